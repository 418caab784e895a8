#include <algorithm>
#include <cmath>
#include <random>
#include <thread>

#include "owlab/errors.hpp"
#include "owlab/operators.hpp"

namespace owlab {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

double g(double f, double p) { return std::pow(std::abs(std::log(f) + 1.0), p); }

struct BatchSums {
  std::vector<double> sum, sumsq;
};

// Each sample is a random binary expansion; {2^j x} is read from the 64 bits after position j.
BatchSums run_batch(double p, const std::vector<int>& js, std::size_t count, std::uint64_t seed) {
  BatchSums out{std::vector<double>(js.size(), 0.0), std::vector<double>(js.size(), 0.0)};
  std::mt19937_64 rng(seed);
  const int jmax = js.back();
  const std::size_t words = static_cast<std::size_t>(jmax) / 64 + 2;
  std::vector<std::uint64_t> bits(words);
  for (std::size_t s = 0; s < count; ++s) {
    for (auto& w : bits) w = rng();
    double fmin = 1.0, fmax = 0.0;
    std::size_t next = 0;
    for (int j = 0; j <= jmax; ++j) {
      const std::size_t q = static_cast<std::size_t>(j) / 64;
      const int r = j % 64;
      const std::uint64_t w = r == 0 ? bits[q] : (bits[q] << r) | (bits[q + 1] >> (64 - r));
      const double f = (static_cast<double>(w >> 11) + 0.5) * 0x1p-53;
      fmin = std::min(fmin, f);
      fmax = std::max(fmax, f);
      while (next < js.size() && js[next] == j) {
        // |log f + 1|^p is unimodal in f, so the sup sits at an extreme.
        const double v = std::max(g(fmin, p), g(fmax, p));
        out.sum[next] += v;
        out.sumsq[next] += v * v;
        ++next;
      }
    }
  }
  return out;
}

}  // namespace

NormalSupResult normal_sup_experiment(double p, std::vector<int> j_values, std::size_t samples, std::uint64_t seed,
                                      int threads) {
  if (!(p > 0) || std::isinf(p)) throw PreconditionError("normal_sup: p must be positive and finite");
  if (samples < 10000) throw PreconditionError("normal_sup: at least 10^4 samples are required");
  if (j_values.empty()) throw PreconditionError("normal_sup: empty J range");
  std::sort(j_values.begin(), j_values.end());
  j_values.erase(std::unique(j_values.begin(), j_values.end()), j_values.end());
  if (j_values.front() < 0) throw PreconditionError("normal_sup: J must be nonnegative");

  constexpr std::size_t kBatch = 4096;
  const std::size_t batches = (samples + kBatch - 1) / kBatch;
  std::vector<BatchSums> results(batches);
  auto work = [&](std::size_t first, std::size_t step) {
    for (std::size_t b = first; b < batches; b += step) {
      const std::size_t count = std::min(kBatch, samples - b * kBatch);
      results[b] = run_batch(p, j_values, count, splitmix64(seed ^ splitmix64(b)));
    }
  };
  const std::size_t nt = static_cast<std::size_t>(std::max(1, threads));
  if (nt == 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < nt; ++t) pool.emplace_back(work, t, nt);
    for (auto& t : pool) t.join();
  }

  NormalSupResult res;
  const double n = static_cast<double>(samples);
  for (std::size_t i = 0; i < j_values.size(); ++i) {
    double s = 0.0, ss = 0.0;
    for (const auto& r : results) {
      s += r.sum[i];
      ss += r.sumsq[i];
    }
    const double mean = s / n;
    const double var = std::max(0.0, (ss / n - mean * mean) * n / (n - 1.0));
    res.rows.push_back({j_values[i], mean, std::sqrt(var / n)});
  }
  for (std::size_t i = 1; i < res.rows.size(); ++i) {
    const auto& a = res.rows[i - 1];
    const auto& b = res.rows[i];
    if (b.mean < a.mean - 3.0 * std::hypot(a.std_error, b.std_error)) res.monotone = false;
  }
  return res;
}

double normal_sup_point(std::uint64_t a, std::uint64_t b, double p, int J) {
  if (b == 0 || a == 0 || a >= b) throw PreconditionError("normal_sup_point: need 0 < a < b");
  if (b >= (std::uint64_t{1} << 62)) throw PreconditionError("normal_sup_point: denominator too large");
  if (J < 0) throw PreconditionError("normal_sup_point: J must be nonnegative");
  double best = 0.0;
  std::uint64_t r = a;
  for (int j = 0; j <= J; ++j) {
    if (r == 0) return kInf;  // dyadic point: {2^j x} = 0
    best = std::max(best, g(static_cast<double>(r) / static_cast<double>(b), p));
    r = (2 * r) % b;
  }
  return best;
}

}  // namespace owlab
