#include "sortition/rounding.hpp"

#include <cmath>
#include <random>

#include "random.hpp"
#include "sortition/error.hpp"

namespace sortition {

namespace {

constexpr double kIntegralTol = 1e-9;

bool fractional(double x) { return std::fabs(x - std::round(x)) > kIntegralTol; }

}  // namespace

std::vector<int> pipage_counts(const std::vector<double>& probs, int m, std::uint64_t seed,
                               int* steps) {
  if (m < 1) throw Error(ErrorCode::kDomain, "m must be >= 1");
  std::mt19937_64 gen(seed);
  std::vector<double> x(probs.size());
  for (size_t j = 0; j < probs.size(); ++j) x[j] = probs[j] * m;
  int taken = 0;
  size_t first = 0;
  while (true) {
    while (first < x.size() && !fractional(x[first])) ++first;
    size_t second = first + 1;
    while (second < x.size() && !fractional(x[second])) ++second;
    if (second >= x.size()) break;
    const double fi = x[first] - std::floor(x[first]);
    const double fj = x[second] - std::floor(x[second]);
    // Raise first / lower second by up, or the reverse by down.
    const double up = std::min(1.0 - fi, fj);
    const double down = std::min(fi, 1.0 - fj);
    if (rng::uniform01(gen) < down / (up + down)) {
      x[first] += up;
      x[second] -= up;
    } else {
      x[first] -= down;
      x[second] += down;
    }
    ++taken;
  }
  if (steps) *steps = taken;
  std::vector<int> counts(x.size());
  long total = 0;
  for (size_t j = 0; j < x.size(); ++j) {
    counts[j] = static_cast<int>(std::lround(x[j]));
    total += counts[j];
  }
  // A lone leftover fraction only arises from input mass not summing to 1.
  if (total != m) throw Error(ErrorCode::kDomain, "distribution does not sum to 1");
  return counts;
}

UniformLottery pipage_round(const PanelDistribution& dist, int m, std::uint64_t seed,
                            PipageTrace* trace) {
  std::vector<double> probs;
  for (const auto& entry : dist.support) probs.push_back(entry.second);
  int steps = 0;
  const auto counts = pipage_counts(probs, m, seed, &steps);
  UniformLottery lottery;
  lottery.m = m;
  for (size_t j = 0; j < counts.size(); ++j) {
    for (int c = 0; c < counts[j]; ++c) lottery.tickets.push_back(dist.support[j].first);
  }
  if (trace) trace->steps = steps;
  return lottery;
}

std::pair<double, double> rounding_bounds(int k, int w_count, int m) {
  if (w_count < 2 || m < 1) throw Error(ErrorCode::kDomain, "rounding bounds need |W| >= 2, m >= 1");
  const double w = w_count;
  const double lw = std::log(w);
  const double b2 = (std::sqrt(0.5 * (1.0 + std::log(2.0) / lw)) * std::sqrt(w * lw) + 1.0) / m;
  return {static_cast<double>(k) / m, b2};
}

ProbabilityAssignment lottery_marginals(const Instance& instance, const UniformLottery& lottery) {
  ProbabilityAssignment out;
  out.pi.assign(instance.n(), 0.0);
  std::vector<int> hits(instance.n(), 0);
  for (const Panel& p : lottery.tickets) {
    for (int i : p.members) ++hits[i];
  }
  for (int i = 0; i < instance.n(); ++i) out.pi[i] = static_cast<double>(hits[i]) / lottery.m;
  return out;
}

bool is_valid_lottery(const Instance& instance, const UniformLottery& lottery) {
  if (lottery.m < 1 || static_cast<int>(lottery.tickets.size()) != lottery.m) return false;
  for (const Panel& p : lottery.tickets) {
    if (!is_valid_panel(instance, p)) return false;
  }
  return true;
}

std::string lottery_text(const std::vector<std::vector<std::string>>& tickets) {
  const size_t width = std::to_string(tickets.empty() ? 0 : tickets.size() - 1).size();
  std::string out;
  for (size_t t = 0; t < tickets.size(); ++t) {
    std::string num = std::to_string(t);
    out += std::string(width - num.size(), '0') + num + "\t";
    for (size_t i = 0; i < tickets[t].size(); ++i) {
      if (i) out += ",";
      out += tickets[t][i];
    }
    out += "\n";
  }
  return out;
}

}  // namespace sortition
