#include "ltf/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <exception>
#include <numbers>
#include <ostream>
#include <random>
#include <thread>

#include "ltf/csv.hpp"
#include "ltf/error.hpp"
#include "ltf/kkt.hpp"
#include "ltf/lasso.hpp"
#include "ltf/pathwise.hpp"

namespace ltf {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Box-Muller on the raw engine output, so the stream does not depend on the
// standard library's distribution implementation.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : engine_(seed) {}

  double next() {
    if (cached_) {
      cached_ = false;
      return spare_;
    }
    const double u1 = uniform_open();
    const double u2 = uniform_open();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    cached_ = true;
    return radius * std::cos(angle);
  }

 private:
  // (0, 1) with 53-bit resolution.
  double uniform_open() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool cached_ = false;
};

double time_scale(const PiecewiseLinearSpec& spec) {
  return spec.normalized_time ? static_cast<double>(spec.n) : 1.0;
}

}  // namespace

void PiecewiseLinearSpec::validate() const {
  if (n < kMinSeriesLength) throw InvalidSpec("spec.n: must be at least 5");
  if (b.empty()) throw InvalidSpec("spec.b: need at least one slope");
  if (r.size() + 1 != b.size())
    throw InvalidSpec("spec.r: need exactly one fraction fewer than slopes");
  for (std::size_t j = 0; j < r.size(); ++j) {
    if (!(r[j] > 0.0 && r[j] < 1.0)) throw InvalidSpec("spec.r: fractions must lie in (0, 1)");
  }
  const auto times = kink_times();
  for (std::size_t j = 0; j < times.size(); ++j) {
    if (times[j] < 2 || times[j] > n - 1)
      throw InvalidSpec("spec.r: kink time " + std::to_string(times[j]) + " is not interior");
    if (j > 0 && times[j] <= times[j - 1])
      throw InvalidSpec("spec.r: kink times must be strictly increasing");
  }
  for (std::size_t j = 0; j + 1 < b.size(); ++j) {
    if (b[j] == b[j + 1]) throw InvalidSpec("spec.b: adjacent slopes must differ");
  }
}

std::vector<std::size_t> PiecewiseLinearSpec::kink_times() const {
  std::vector<std::size_t> times;
  times.reserve(r.size());
  for (double f : r)
    times.push_back(static_cast<std::size_t>(std::floor(static_cast<double>(n) * f + 0.5)) + 1);
  return times;
}

std::vector<double> PiecewiseLinearSpec::intercepts() const {
  const auto times = kink_times();
  const double scale = time_scale(*this);
  std::vector<double> a(b.size());
  a[0] = a1;
  for (std::size_t j = 1; j < b.size(); ++j)
    a[j] = a[j - 1] + (b[j - 1] - b[j]) * (static_cast<double>(times[j - 1]) / scale);
  return a;
}

KinkSet PiecewiseLinearSpec::true_kinks() const {
  const auto times = kink_times();
  const double scale = time_scale(*this);
  std::vector<Kink> kinks;
  for (std::size_t j = 0; j < times.size(); ++j) {
    const double change = b[j + 1] - b[j];
    kinks.push_back({times[j], change > 0 ? 1 : -1, std::abs(change) / scale});
  }
  return KinkSet(std::move(kinks));
}

double PiecewiseLinearSpec::min_slope_change() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& k : true_kinks().kinks()) m = std::min(m, k.magnitude);
  return m;
}

std::size_t PiecewiseLinearSpec::min_segment_size() const {
  const auto times = kink_times();
  std::size_t start = 1;
  std::size_t m = n;
  for (std::size_t t : times) {
    m = std::min(m, t - start);
    start = t;
  }
  return std::min(m, n + 1 - start);
}

PiecewiseLinearSpec example1_spec(std::size_t n) {
  PiecewiseLinearSpec s;
  s.n = n;
  s.r = {0.3, 0.7};
  s.b = {-30.0, 0.0, 30.0};
  return s;
}

PiecewiseLinearSpec example2_spec(std::size_t n) {
  PiecewiseLinearSpec s;
  s.n = n;
  s.r = {0.2, 0.4, 0.6, 0.8};
  s.b = {-6.0, 40.0, -5.0, 35.0, -3.0};
  return s;
}

std::vector<double> gen_trend(const PiecewiseLinearSpec& spec) {
  spec.validate();
  const auto times = spec.kink_times();
  const auto a = spec.intercepts();
  const double scale = time_scale(spec);
  std::vector<double> mu(spec.n);
  std::size_t seg = 0;
  for (std::size_t t = 1; t <= spec.n; ++t) {
    while (seg < times.size() && t >= times[seg]) ++seg;
    mu[t - 1] = a[seg] + spec.b[seg] * (static_cast<double>(t) / scale);
  }
  return mu;
}

double noise_sigma(const std::vector<double>& mu0, const NoiseSpec& noise) {
  if (std::isinf(noise.snr) && noise.snr > 0) return 0.0;
  if (!(noise.snr > 0.0)) throw InvalidSpec("noise.snr: must be positive");
  double level = 0.0;
  for (double v : mu0) level += noise.signed_mean ? v : std::abs(v);
  level /= static_cast<double>(mu0.size());
  const double sigma = level / noise.snr;
  if (!(sigma > 0.0)) throw ZeroSigma("trend level is not positive; noise sd would be " +
                                      format_double(sigma));
  return sigma;
}

TimeSeries add_noise(const std::vector<double>& mu0, const NoiseSpec& noise) {
  const double sigma = noise_sigma(mu0, noise);
  if (sigma == 0.0) return TimeSeries(mu0);
  GaussianStream g(noise.seed);
  std::vector<double> y(mu0.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = mu0[i] + sigma * g.next();
  return TimeSeries(std::move(y));
}

std::uint64_t replication_seed(std::uint64_t base_seed, std::uint64_t rep) {
  return splitmix64(splitmix64(base_seed) ^ rep);
}

std::string rng_identity() {
  return "mt19937_64 + Box-Muller; seed_r = splitmix64(splitmix64(base_seed) xor r)";
}

double relative_error(const std::vector<double>& mu_hat, const std::vector<double>& mu0) {
  if (mu_hat.size() != mu0.size()) throw InvalidDimension("vectors differ in length");
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < mu_hat.size(); ++i) {
    const double d = mu_hat[i] - mu0[i];
    num += d * d;
    den += mu_hat[i] * mu_hat[i];
  }
  if (den == 0.0) throw UndefinedMetric("relative error undefined for a zero fit");
  return num / den;
}

HausdorffResult hausdorff(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b,
                          std::size_t n) {
  if (a.empty() && b.empty()) return {};
  if (a.empty() || b.empty()) {
    const auto v = static_cast<double>(n);
    return {v, v, v};
  }
  auto directed = [](const std::vector<std::size_t>& from, const std::vector<std::size_t>& to) {
    double worst = 0.0;
    for (std::size_t x : from) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t y : to)
        best = std::min(best, std::abs(static_cast<double>(x) - static_cast<double>(y)));
      worst = std::max(worst, best);
    }
    return worst;
  };
  HausdorffResult h;
  h.e_ab = directed(b, a);
  h.e_ba = directed(a, b);
  h.hd = std::max(h.e_ab, h.e_ba);
  return h;
}

bool detection_consistent(const KinkSet& fit, const KinkSet& truth) {
  return fit.times() == truth.times();
}

bool sign_consistent(const KinkSet& fit, const KinkSet& truth) { return fit == truth; }

std::size_t near_kink_small_count(const KinkSet& fit, const PiecewiseLinearSpec& spec,
                                  std::size_t radius, double fraction) {
  const auto truth = spec.kink_times();
  const double cutoff = fraction * spec.min_slope_change();
  std::size_t count = 0;
  for (const auto& k : fit.kinks()) {
    if (!(k.magnitude < cutoff)) continue;
    const bool near = std::any_of(truth.begin(), truth.end(), [&](std::size_t t) {
      return (k.time > t ? k.time - t : t - k.time) <= radius;
    });
    if (near) ++count;
  }
  return count;
}

SolverKind parse_solver(std::string_view name) {
  std::string lower;
  for (char c : name) lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (lower == "pathwise") return SolverKind::Pathwise;
  if (lower == "lasso") return SolverKind::Lasso;
  throw InvalidSpec("unknown solver '" + std::string(name) + "' (expected pathwise or lasso)");
}

std::string_view solver_name(SolverKind s) {
  return s == SolverKind::Pathwise ? "pathwise" : "lasso";
}

void ExperimentConfig::validate() const {
  spec.validate();
  if (replications == 0) throw InvalidSpec("replications: must be positive");
  if (!(noise.snr > 0.0)) throw InvalidSpec("noise.snr: must be positive");
  if (grid_size == 0) throw InvalidSpec("grid.size: must be positive");
  if (!(grid_min_rel > 0.0 && grid_min_rel <= 1.0))
    throw InvalidSpec("grid.min_rel: must lie in (0, 1]");
  if (!(tol_kink > 0.0)) throw InvalidSpec("tol_kink: must be positive");
  if (!(lasso_tol > 0.0)) throw InvalidSpec("lasso.tol: must be positive");
  if (lasso_max_iter == 0) throw InvalidSpec("lasso.max_iter: must be positive");
}

ReplicationResult run_replication(const ExperimentConfig& config, std::size_t rep) {
  const auto& spec = config.spec;
  ReplicationResult out;
  out.rep = rep;
  out.seed = replication_seed(config.base_seed, rep);

  const std::vector<double> mu0 = gen_trend(spec);
  NoiseSpec noise = config.noise;
  noise.seed = out.seed;
  const TimeSeries y = add_noise(mu0, noise);

  std::vector<double> grid =
      make_lambda_grid(lambda_max(y), config.grid_size, config.grid_min_rel, false);
  if (grid.front() == 0.0) grid.front() = 1.0;  // affine data; any lambda returns it

  LambdaPath path;
  if (config.solver == SolverKind::Pathwise) {
    PathwiseOptions opts;
    opts.tol_kink = config.tol_kink;
    path = fit_path(y, grid, opts);
  } else {
    LassoOptions opts;
    opts.tol = config.lasso_tol;
    opts.polish = config.lasso_polish;
    opts.max_iter = config.lasso_max_iter;
    opts.tol_kink = config.tol_kink;
    path = lasso_path(y, grid, opts);
  }
  for (const auto& e : path.entries()) {
    if (!e.fit.converged) ++out.path_unconverged;
    if (!e.certificate.passed) ++out.kkt_failures;
  }

  const Selection sel = select(path, y, config.criterion, config.tol_kink);
  out.lambda = sel.lambda;
  out.converged = sel.fit.converged;
  const KinkSet est = extract_kinks(sel.fit, config.tol_kink);
  const KinkSet truth = spec.true_kinks();
  const HausdorffResult h = hausdorff(est.times(), truth.times(), spec.n);
  const double nd = static_cast<double>(spec.n);

  MetricsRow& m = out.metrics;
  m.re = relative_error(sel.fit.mu_hat, mu0);
  m.e_ab = h.e_ab / nd;
  m.e_ba = h.e_ba / nd;
  m.hd = h.hd / nd;
  m.j_count = est.size();
  m.detection_consistent = detection_consistent(est, truth);
  m.sign_consistent = sign_consistent(est, truth);
  m.near_kink_small = near_kink_small_count(est, spec);
  return out;
}

Aggregate aggregate(const std::vector<double>& values) {
  Aggregate a;
  if (values.empty()) return a;
  double sum = 0.0;
  for (double v : values) sum += v;
  a.mean = sum / static_cast<double>(values.size());
  if (values.size() < 2) return a;
  double ss = 0.0;
  for (double v : values) ss += (v - a.mean) * (v - a.mean);
  a.sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
  return a;
}

ExperimentSummary run_experiment(const ExperimentConfig& config) {
  config.validate();
  const std::size_t reps = config.replications;
  std::size_t workers = config.workers;
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, reps);

  std::vector<ReplicationResult> results(reps);
  std::vector<std::exception_ptr> errors(reps);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t r = next++; r < reps; r = next++) {
      try {
        results[r] = run_replication(config, r);
      } catch (...) {
        errors[r] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  ExperimentSummary s;
  s.config = config;
  s.replications = std::move(results);
  std::vector<double> re, j, eab, eba, hd, near;
  std::size_t sign_ok = 0;
  std::size_t detect_ok = 0;
  for (const auto& r : s.replications) {
    if (!r.converged) {
      ++s.failed;
      continue;
    }
    ++s.used;
    re.push_back(r.metrics.re);
    j.push_back(static_cast<double>(r.metrics.j_count));
    eab.push_back(r.metrics.e_ab);
    eba.push_back(r.metrics.e_ba);
    hd.push_back(r.metrics.hd);
    near.push_back(static_cast<double>(r.metrics.near_kink_small));
    sign_ok += r.metrics.sign_consistent ? 1 : 0;
    detect_ok += r.metrics.detection_consistent ? 1 : 0;
  }
  s.re = aggregate(re);
  s.j_count = aggregate(j);
  s.e_ab = aggregate(eab);
  s.e_ba = aggregate(eba);
  s.hd = aggregate(hd);
  s.near_kink_small = aggregate(near);
  if (s.used > 0) {
    s.sign_frequency = static_cast<double>(sign_ok) / static_cast<double>(s.used);
    s.detection_frequency = static_cast<double>(detect_ok) / static_cast<double>(s.used);
  }
  return s;
}

void write_experiment_csv(std::ostream& out, const ExperimentSummary& s) {
  const auto& c = s.config;
  out << "example,n,snr,criterion,solver,reps_used,reps_failed,re_mean,re_sd,j_mean,j_sd,"
         "eab_mean,eab_sd,eba_mean,eba_sd,hd_mean,hd_sd,sn_freq,detect_freq,"
         "near_kink_small_mean,near_kink_small_sd\n";
  out << c.label << ',' << c.spec.n << ',' << format_double(c.noise.snr) << ','
      << criterion_name(c.criterion) << ',' << solver_name(c.solver) << ',' << s.used << ','
      << s.failed;
  for (const Aggregate* a : {&s.re, &s.j_count, &s.e_ab, &s.e_ba, &s.hd})
    out << ',' << format_double(a->mean) << ',' << format_double(a->sd);
  out << ',' << format_double(s.sign_frequency) << ',' << format_double(s.detection_frequency)
      << ',' << format_double(s.near_kink_small.mean) << ','
      << format_double(s.near_kink_small.sd) << '\n';
}

void write_replications_csv(std::ostream& out, const ExperimentSummary& s) {
  out << "rep,seed,lambda,converged,path_unconverged,kkt_failures,re,j_count,eab,eba,hd,detect,sign,"
         "near_kink_small\n";
  for (const auto& r : s.replications) {
    const auto& m = r.metrics;
    out << r.rep << ',' << r.seed << ',' << format_double(r.lambda) << ','
        << (r.converged ? 1 : 0) << ',' << r.path_unconverged << ',' << r.kkt_failures << ',' << format_double(m.re) << ','
        << m.j_count << ',' << format_double(m.e_ab) << ',' << format_double(m.e_ba) << ','
        << format_double(m.hd) << ',' << (m.detection_consistent ? 1 : 0) << ','
        << (m.sign_consistent ? 1 : 0) << ',' << m.near_kink_small << '\n';
  }
}

}  // namespace ltf
