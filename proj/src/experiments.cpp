#include "tamed/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace tamed {

namespace {

int resolve_threads(int threads) {
  if (threads > 0) return threads;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Runs work(i) for i in [0, count) on a worker pool. Each i is processed by
/// exactly one worker and writes only to its own output slot, so the set of
/// results is independent of the pool size; reductions happen afterwards in
/// index order.
void parallel_for(int count, int threads, const std::function<void(int)>& work) {
  const int pool_size = std::min(resolve_threads(threads), count);
  if (pool_size <= 1) {
    for (int i = 0; i < count; ++i) work(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(pool_size));
  for (int t = 0; t < pool_size; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const int i = next.fetch_add(1, std::memory_order_relaxed);
        if (i >= count) return;
        try {
          work(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace

ErrorTable strong_error(const Problem& problem, const SchemeKind& scheme,
                        std::vector<int> N_list, int N_ref, int paths,
                        std::uint64_t master_seed, int threads) {
  if (paths < 2) throw std::invalid_argument("strong_error: need at least 2 paths");
  if (N_list.empty()) throw std::invalid_argument("strong_error: empty N_list");
  if (N_ref < 1) throw std::invalid_argument("strong_error: N_ref must be >= 1");
  std::sort(N_list.begin(), N_list.end());
  for (int N : N_list) {
    if (N < 1 || N_ref % N != 0) {
      std::ostringstream oss;
      oss << "strong_error: N_ref = " << N_ref << " is not a positive multiple of N = " << N;
      throw std::invalid_argument(oss.str());
    }
  }

  const std::size_t levels = N_list.size();
  const std::size_t P = static_cast<std::size_t>(paths);
  // Per-path slots, reduced sequentially afterwards: the table is identical
  // for every pool size.
  std::vector<std::vector<double>> sq_err(levels, std::vector<double>(P, 0.0));
  std::vector<std::vector<char>> excluded(levels, std::vector<char>(P, 0));

  parallel_for(paths, threads, [&](int path) {
    const PathIncrements fine =
        generate_path(master_seed, path, N_ref, problem.T);
    const SimulateResult ref = simulate_path(problem, scheme, fine);
    for (std::size_t j = 0; j < levels; ++j) {
      const int N = N_list[j];
      const PathIncrements coarse = coarsen(fine, N_ref / N);
      const SimulateResult run = simulate_path(problem, scheme, coarse);
      if (ref.exploded() || run.exploded()) {
        excluded[j][static_cast<std::size_t>(path)] = 1;
      } else {
        sq_err[j][static_cast<std::size_t>(path)] =
            (run.terminal - ref.terminal).squaredNorm();
      }
    }
  });

  ErrorTable table;
  table.problem = problem.name;
  table.scheme = step_kind_name(scheme.kind);
  table.taming_enabled = scheme.taming_enabled;
  table.N_list = N_list;
  table.N_ref = N_ref;
  table.paths = paths;
  table.master_seed = master_seed;
  for (std::size_t j = 0; j < levels; ++j) {
    ErrorRow row;
    row.N = N_list[j];
    long included = 0;
    double sum = 0.0;
    for (std::size_t i = 0; i < P; ++i) {
      if (excluded[j][i]) {
        ++row.explosions;
      } else {
        sum += sq_err[j][i];
        ++included;
      }
    }
    if (included == 0) {
      row.rms_error = std::numeric_limits<double>::quiet_NaN();
      row.std_error = std::numeric_limits<double>::quiet_NaN();
      std::ostringstream oss;
      oss << "all " << paths << " paths exploded at N = " << row.N;
      table.warnings.push_back(oss.str());
    } else {
      const double mean_sq = sum / static_cast<double>(included);
      row.rms_error = std::sqrt(mean_sq);
      if (included >= 2) {
        double ss = 0.0;
        for (std::size_t i = 0; i < P; ++i) {
          if (excluded[j][i]) continue;
          const double dev = sq_err[j][i] - mean_sq;
          ss += dev * dev;
        }
        row.std_error =
            std::sqrt(ss / static_cast<double>(included - 1) / static_cast<double>(included));
      } else {
        row.std_error = std::numeric_limits<double>::quiet_NaN();
      }
    }
    table.rows.push_back(row);
  }
  return table;
}

RateFit fit_rate(const ErrorTable& table) {
  RateFit fit;
  std::vector<double> xs, ys;
  for (const ErrorRow& row : table.rows) {
    if (!std::isfinite(row.rms_error) || row.rms_error <= 0.0) {
      std::ostringstream oss;
      oss << "excluded row N = " << row.N << " (rms_error = " << row.rms_error << ")";
      fit.warnings.push_back(oss.str());
      continue;
    }
    xs.push_back(std::log2(static_cast<double>(row.N)));
    ys.push_back(std::log2(row.rms_error));
  }
  fit.points_used = static_cast<int>(xs.size());
  if (fit.points_used < 3)
    throw std::runtime_error("fit_rate: fewer than 3 usable rows in the error table");

  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  const double raw_slope = sxy / sxx;
  fit.slope = -raw_slope;  // error decays in N; report the positive rate
  fit.intercept = my - raw_slope * mx;
  fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

TerminalBatch simulate_terminals(const Problem& problem, const SchemeKind& scheme,
                                 int N, int paths, std::uint64_t master_seed,
                                 int threads) {
  if (N < 1) throw std::invalid_argument("simulate_terminals: N must be >= 1");
  if (paths < 1) throw std::invalid_argument("simulate_terminals: paths must be >= 1");
  TerminalBatch batch;
  batch.terminals.assign(static_cast<std::size_t>(paths), Vec());
  batch.exploded.assign(static_cast<std::size_t>(paths), 0);
  batch.exploded_at.assign(static_cast<std::size_t>(paths), -1);

  parallel_for(paths, threads, [&](int path) {
    const PathIncrements incs = generate_path(master_seed, path, N, problem.T);
    SimulateResult run = simulate_path(problem, scheme, incs);
    const std::size_t i = static_cast<std::size_t>(path);
    batch.terminals[i] = std::move(run.terminal);
    if (run.exploded()) {
      batch.exploded[i] = 1;
      batch.exploded_at[i] = *run.exploded_at;
    }
  });
  for (char flag : batch.exploded) batch.explosion_count += flag;
  return batch;
}

std::vector<MomentRow> moment_probe(const Problem& problem, const SchemeKind& scheme,
                                    int p, const std::vector<int>& N_list, int paths,
                                    std::uint64_t master_seed, int threads) {
  if (p < 2 || p % 2 != 0)
    throw std::invalid_argument("moment_probe: p must be even and >= 2");
  if (paths < 100) throw std::invalid_argument("moment_probe: need at least 100 paths");

  std::vector<MomentRow> rows;
  rows.reserve(N_list.size());
  for (int N : N_list) {
    const TerminalBatch batch =
        simulate_terminals(problem, scheme, N, paths, master_seed, threads);
    MomentRow row;
    row.N = N;
    row.explosions = batch.explosion_count;
    if (batch.explosion_count > 0) {
      row.moment = std::numeric_limits<double>::infinity();
    } else {
      double sum = 0.0;
      for (const Vec& x : batch.terminals)
        sum += std::pow(x.squaredNorm(), p / 2.0);
      row.moment = sum / static_cast<double>(paths);
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace tamed
