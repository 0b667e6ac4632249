#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "l2t/algebra.hpp"

namespace l2t {

namespace {

std::int64_t ipow(std::int64_t base, int e) {
  std::int64_t r = 1;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

// Neumaier-compensated running sum.
struct CompensatedSum {
  double sum = 0.0, comp = 0.0;
  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      comp += (sum - t) + x;
    else
      comp += (x - t) + sum;
    sum = t;
  }
  double value() const { return sum + comp; }
};

// Fixed chunks summed independently and combined in chunk order, so the result does
// not depend on the number of threads.
constexpr std::int64_t kChunk = 2048;

void sum_chunk(int rank, int n, std::int64_t begin, std::int64_t end, const TorusIntegrand& f,
               std::vector<CompensatedSum>& acc) {
  std::vector<double> theta(rank), out(acc.size());
  std::vector<int> idx(rank, 0);
  std::int64_t rest = begin;
  for (int d = rank - 1; d >= 0; --d) {
    idx[d] = static_cast<int>(rest % n);
    rest /= n;
  }
  const double h = 2.0 * M_PI / n;
  for (std::int64_t p = begin; p < end; ++p) {
    for (int d = 0; d < rank; ++d) theta[d] = (idx[d] + 0.5) * h;
    f(theta, n, out);
    for (std::size_t o = 0; o < acc.size(); ++o) acc[o].add(out[o]);
    for (int d = rank - 1; d >= 0; --d) {
      if (++idx[d] < n) break;
      idx[d] = 0;
    }
  }
}

int worker_count(std::int64_t chunks) {
  static const int hw = [] {
    if (const char* env = std::getenv("L2T_THREADS")) {
      const int v = std::atoi(env);
      if (v > 0) return v;
    }
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  }();
  return static_cast<int>(std::min<std::int64_t>(hw, chunks));
}

std::vector<double> grid_mean(int rank, int n, std::size_t outputs, const TorusIntegrand& f) {
  const std::int64_t total = ipow(n, rank);
  const std::int64_t chunks = (total + kChunk - 1) / kChunk;
  std::vector<std::vector<CompensatedSum>> partial(chunks, std::vector<CompensatedSum>(outputs));
  std::atomic<std::int64_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  const auto work = [&] {
    for (std::int64_t c; (c = next.fetch_add(1)) < chunks;) {
      try {
        sum_chunk(rank, n, c * kChunk, std::min(total, (c + 1) * kChunk), f, partial[c]);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        next = chunks;
      }
    }
  };
  const int workers = worker_count(chunks);
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);

  std::vector<CompensatedSum> acc(outputs);
  for (const auto& part : partial)
    for (std::size_t o = 0; o < outputs; ++o) {
      acc[o].add(part[o].sum);
      acc[o].add(part[o].comp);
    }
  std::vector<double> mean(outputs);
  for (std::size_t o = 0; o < outputs; ++o) mean[o] = acc[o].value() / static_cast<double>(total);
  return mean;
}

struct Verdict {
  bool converged = false;
  double value = 0.0, error = 0.0;
};

// Decide convergence of one output from its level history.
Verdict judge(const std::vector<double>& v, double tol) {
  Verdict out;
  const std::size_t L = v.size();
  out.value = v.back();
  if (L < 2) return out;
  const double d = v[L - 1] - v[L - 2];
  out.error = std::abs(d);
  if (std::abs(d) <= 1e-13 * std::max(1.0, std::abs(v.back()))) {
    out.converged = true;
    return out;
  }
  if (L < 3) return out;
  const double dp = v[L - 2] - v[L - 3];
  if (std::abs(d) <= tol && std::abs(d) <= 0.5 * std::abs(dp)) {
    out.converged = true;
    return out;
  }
  if (L < 4) return out;
  auto aitken = [&](std::size_t last, double& value) {
    const double d2 = v[last] - v[last - 1];
    const double d1 = v[last - 1] - v[last - 2];
    if (d2 == d1 || d1 == 0.0) return false;
    if (std::abs(d2 / d1) >= 0.95) return false;
    value = v[last] - d2 * d2 / (d2 - d1);
    return true;
  };
  double a_now = 0.0, a_prev = 0.0;
  if (aitken(L - 1, a_now) && aitken(L - 2, a_prev)) {
    out.value = a_now;
    out.error = std::abs(a_now - a_prev);
    out.converged = out.error <= tol;
  }
  return out;
}

}  // namespace

QuadratureResult integrate_over_torus(int rank, std::size_t outputs, const TorusIntegrand& f,
                                      const QuadratureOptions& options) {
  QuadratureResult res;
  res.values.assign(outputs, 0.0);
  res.errors.assign(outputs, 0.0);
  if (rank == 0) {
    f({}, 0, res.values);
    res.levels = 1;
    return res;
  }
  int n = std::max(2, options.start_resolution);
  // Leave room for at least three doubling levels under the point budget.
  while (n > 8 && ipow(4 * static_cast<std::int64_t>(n), rank) > options.max_points) n /= 2;

  std::vector<std::vector<double>> history(outputs);
  std::vector<Verdict> verdicts(outputs);
  while (true) {
    if (ipow(n, rank) > options.max_points) {
      std::ostringstream os;
      os.precision(17);
      os << "quadrature did not reach tolerance " << options.tolerance << " within "
         << options.max_points << " points; last estimates:";
      for (std::size_t o = 0; o < outputs; ++o)
        os << " " << verdicts[o].value << " (+/- " << verdicts[o].error << ")";
      fail(ErrorKind::NonConvergent, os.str());
    }
    const std::vector<double> mean = grid_mean(rank, n, outputs, f);
    bool all = true;
    for (std::size_t o = 0; o < outputs; ++o) {
      history[o].push_back(mean[o]);
      verdicts[o] = judge(history[o], options.tolerance);
      all = all && verdicts[o].converged;
    }
    ++res.levels;
    res.resolution = n;
    if (all) break;
    n *= 2;
  }
  for (std::size_t o = 0; o < outputs; ++o) {
    res.values[o] = verdicts[o].value;
    res.errors[o] = verdicts[o].error;
  }
  return res;
}

}  // namespace l2t
