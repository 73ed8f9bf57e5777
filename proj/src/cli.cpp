#include "polyvar/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <ctime>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "polyvar/error.hpp"
#include "polyvar/exact_moments.hpp"
#include "polyvar/geom.hpp"
#include "polyvar/metrics.hpp"
#include "polyvar/oracle.hpp"
#include "polyvar/rng.hpp"
#include "polyvar/samplers.hpp"

namespace polyvar {
namespace {

using Json = nlohmann::ordered_json;

std::string iso_timestamp_utc() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[80];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02dZ", tm.tm_year + 1900,
                tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec);
  return buf;
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// FNV-1a over the bit patterns of the coordinates; stable row identity
// for a direction across runs.
std::string theta_hash(std::span<const double> coords) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (double c : coords) {
    std::uint64_t bits;
    std::memcpy(&bits, &c, sizeof bits);
    for (int b = 0; b < 8; ++b) {
      h ^= (bits >> (8 * b)) & 0xff;
      h *= 0x100000001b3ULL;
    }
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void require_finite_tree(const Json& j) {
  if (j.is_number_float()) {
    if (!std::isfinite(j.get<double>()))
      throw Error(errc::not_finite, "refusing to emit a non-finite result");
  } else if (j.is_object() || j.is_array()) {
    for (const auto& item : j) require_finite_tree(item);
  }
}

UnitDirection random_unit(int n, RngStream& rng) {
  std::vector<double> v(n);
  for (;;) {
    for (int i = 0; i < n; ++i) v[i] = rng.gaussian();
    if (norm2(v) > 1e-8) return normalize_direction(v);
  }
}

// Gaussian direction orthogonalized against theta and any prior picks.
std::vector<double> random_unit_orthogonal(const UnitDirection& theta,
                                           const std::vector<std::vector<double>>& prior,
                                           RngStream& rng) {
  const int n = theta.n;
  std::vector<double> v(n);
  for (;;) {
    for (int i = 0; i < n; ++i) v[i] = rng.gaussian();
    double proj = dot(v, theta.coords);
    for (int i = 0; i < n; ++i) v[i] -= proj * theta.coords[i];
    for (const auto& p : prior) {
      proj = dot(v, p);
      for (int i = 0; i < n; ++i) v[i] -= proj * p[i];
    }
    const double nrm = norm2(v);
    if (nrm > 1e-8) {
      for (int i = 0; i < n; ++i) v[i] /= nrm;
      return v;
    }
  }
}

enum class CliBody { cube_proj, cross_proj, cube, simplex };

const std::map<std::string, CliBody> kBodyNames = {
    {"cube-proj", CliBody::cube_proj},
    {"cross-proj", CliBody::cross_proj},
    {"cube", CliBody::cube},
    {"simplex", CliBody::simplex},
};

bool is_projection_body(CliBody b) {
  return b == CliBody::cube_proj || b == CliBody::cross_proj;
}

struct Options {
  std::string body = "cube-proj";
  int n = 3;
  bool n_explicit = false;
  int n_min = 0;
  int n_max = 0;
  std::string theta = "random";
  std::uint64_t samples = 1000000;
  std::uint64_t seed = 1;
  int batches = 64;
  int trials = 0;
  std::string out;
  std::string format;
  int threads = 1;
  std::uint64_t theta_stream = 0;

  std::vector<std::string> argv_echo;
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> values;
  std::string token;
  std::istringstream in(text);
  while (std::getline(in, token, ',')) {
    std::istringstream item(token);
    double v;
    while (item >> v) values.push_back(v);
  }
  return values;
}

// theta specs: random | axis:i (1-based) | coords:a,b,... | file:path
UnitDirection resolve_theta(const Options& opt) {
  const std::string& spec = opt.theta;

  if (spec == "random") {
    RngStream rng(opt.seed, opt.theta_stream);
    return random_unit(opt.n, rng);
  }
  if (spec.rfind("axis:", 0) == 0) {
    const int axis = std::atoi(spec.c_str() + 5);
    if (axis < 1 || axis > opt.n)
      throw UsageError("axis index must be in [1, n]");
    std::vector<double> v(opt.n, 0.0);
    v[axis - 1] = 1.0;
    return normalize_direction(v);
  }

  std::vector<double> values;
  if (spec.rfind("coords:", 0) == 0) {
    values = parse_number_list(spec.substr(7));
  } else if (spec.rfind("file:", 0) == 0) {
    std::ifstream in(spec.substr(5));
    if (!in) throw Error(errc::io_error, "cannot open theta file " + spec.substr(5));
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    for (char& c : text)
      if (c == '\n' || c == '\t' || c == ' ') c = ',';
    values = parse_number_list(text);
  } else {
    throw UsageError("unknown theta spec '" + spec + "'");
  }

  if (values.size() < 2) throw UsageError("theta needs at least two coordinates");
  if (opt.n_explicit && static_cast<int>(values.size()) != opt.n)
    throw UsageError("--theta length disagrees with --n");
  return normalize_direction(values);
}

struct BodySampler {
  int dim = 0;
  bool has_theta = false;
  UnitDirection theta;
  std::string estimator = "direct";
  std::function<std::function<double(RngStream&, std::span<double>)>(int)> factory;
};

BodySampler make_body_sampler(CliBody body, int n, const Options& opt) {
  BodySampler out;
  switch (body) {
    case CliBody::cube_proj: {
      Options local = opt;
      local.n = n;
      out.theta = resolve_theta(local);
      out.has_theta = true;
      out.dim = out.theta.n - 1;
      const HyperplaneFrame frame = hyperplane_frame(out.theta);
      const UnitDirection theta = out.theta;
      out.factory = [theta, frame](int) {
        auto s = std::make_shared<CubeProjectionSampler>(theta, frame);
        return [s](RngStream& rng, std::span<double> x) { return s->sample(rng, x); };
      };
      break;
    }
    case CliBody::cross_proj: {
      Options local = opt;
      local.n = n;
      out.theta = resolve_theta(local);
      out.has_theta = true;
      out.dim = out.theta.n - 1;
      const HyperplaneFrame frame = hyperplane_frame(out.theta);
      const UnitDirection theta = out.theta;
      if (out.theta.n <= 20) {
        out.estimator = "exact";
        out.factory = [theta, frame](int) {
          auto s = std::make_shared<CrossProjectionSampler>(theta, frame);
          return [s](RngStream& rng, std::span<double> x) { return s->sample(rng, x); };
        };
      } else {
        out.estimator = "weighted";
        out.factory = [theta, frame](int) {
          auto s = std::make_shared<WeightedCrossSampler>(theta, frame);
          return [s](RngStream& rng, std::span<double> x) { return s->sample(rng, x); };
        };
      }
      break;
    }
    case CliBody::cube: {
      out.dim = n;
      out.factory = [n](int) {
        auto s = std::make_shared<ScaledCubeSampler>(n);
        return [s](RngStream& rng, std::span<double> x) { return s->sample(rng, x); };
      };
      break;
    }
    case CliBody::simplex: {
      out.dim = n - 1;
      out.factory = [n](int) {
        auto s = std::make_shared<CenteredSimplexSampler>(n);
        return [s](RngStream& rng, std::span<double> x) { return s->sample(rng, x); };
      };
      break;
    }
  }
  return out;
}

std::vector<std::vector<double>> canonical_basis(int dim) {
  std::vector<std::vector<double>> basis(dim, std::vector<double>(dim, 0.0));
  for (int i = 0; i < dim; ++i) basis[i][i] = 1.0;
  return basis;
}

Json meta_block(const Options& opt) {
  Json meta;
  meta["version"] = kVersion;
  meta["seed"] = opt.seed;
  meta["timestamp-utc"] = iso_timestamp_utc();
  meta["argv"] = opt.argv_echo;
  return meta;
}

Json config_block(const Options& opt, const std::string& subcommand) {
  Json cfg;
  cfg["subcommand"] = subcommand;
  cfg["body"] = opt.body;
  cfg["n"] = opt.n;
  if (opt.n_min > 0) cfg["n-min"] = opt.n_min;
  if (opt.n_max > 0) cfg["n-max"] = opt.n_max;
  cfg["theta"] = opt.theta;
  cfg["samples"] = opt.samples;
  cfg["batches"] = opt.batches;
  if (opt.trials > 0) cfg["trials"] = opt.trials;
  cfg["threads"] = opt.threads;
  cfg["format"] = opt.format.empty() ? "json" : opt.format;
  return cfg;
}

void write_output(const Options& opt, const std::string& payload) {
  if (opt.out.empty()) {
    std::cout << payload;
    if (payload.empty() || payload.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream out(opt.out, std::ios::binary);
  if (!out) throw Error(errc::io_error, "cannot open output file " + opt.out);
  out << payload;
  if (payload.empty() || payload.back() != '\n') out << '\n';
  if (!out) throw Error(errc::io_error, "failed writing " + opt.out);
}

void emit_json(const Options& opt, const std::string& subcommand, const Json& results) {
  Json doc;
  doc["meta"] = meta_block(opt);
  doc["config"] = config_block(opt, subcommand);
  doc["results"] = results;
  require_finite_tree(doc);
  write_output(opt, doc.dump(2));
}

Json report_to_json(const ConjectureReport& r) {
  Json j;
  j["count"] = r.count;
  j["weight_sum"] = r.weight_sum;
  j["e_x1"] = r.e_x1;
  j["e_x2"] = r.e_x2;
  j["e_x2_se"] = r.e_x2_se;
  j["e_x4"] = r.e_x4;
  j["var_x2"] = r.var_x2;
  j["var_x2_se"] = r.var_x2_se;
  j["sigma"] = r.sigma;
  j["lambda2"] = r.lambda2;
  j["lambda2_min"] = r.lambda2_min;
  j["b2"] = r.b2;
  j["variance_ratio"] = r.variance_ratio;
  j["variance_ratio_se"] = r.variance_ratio_se;
  j["thin_shell_ratio"] = r.thin_shell_ratio;
  if (r.has_basis) {
    j["a_eta"] = r.a_eta;
    if (r.has_pair_sums) {
      j["a_eta_se"] = r.a_eta_se;
      j["snc_min"] = r.snc_min;
      j["snc_max"] = r.snc_max;
      j["decomposition_residual"] = r.decomposition_residual;
    }
  }
  return j;
}

// Distribution-free facts that must hold on any finalized report; a
// violation is a mathematical failure, not a sampling fluke.
void check_report_identities(const ConjectureReport& r) {
  const double ratio = r.e_x2 > 0.0 ? r.var_x2 / r.e_x2 : 0.0;
  if (r.sigma * r.sigma > ratio + 1e-12 * std::max(1.0, ratio))
    throw Error(errc::degenerate_input, "thin-shell width exceeded Var/E bound");
  if (r.has_basis && r.has_pair_sums &&
      r.decomposition_residual > 1e-10 * std::max(1.0, r.var_x2))
    throw Error(errc::degenerate_input, "variance decomposition identity violated");
}

int run_moments(const Options& opt) {
  const CliBody body = kBodyNames.at(opt.body);
  const BodySampler sampler = make_body_sampler(body, opt.n, opt);
  const int n_eff = sampler.has_theta ? sampler.theta.n : opt.n;

  AccumulatorConfig cfg;
  cfg.dim = sampler.dim;
  cfg.basis = canonical_basis(sampler.dim);
  cfg.pair_sums = true;
  cfg.batches = opt.batches;

  const MomentAccumulator acc = accumulate_stream(
      cfg, opt.samples, opt.threads, opt.seed,
      10000 + static_cast<std::uint64_t>(n_eff) * 256, sampler.factory);
  const ConjectureReport report = acc.finalize();
  check_report_identities(report);

  Json results = report_to_json(report);
  results["n"] = n_eff;
  results["body"] = opt.body;
  results["estimator"] = sampler.estimator;
  if (sampler.has_theta) {
    results["theta"] = sampler.theta.coords;
    results["theta_hash"] = theta_hash(sampler.theta.coords);
  }

  Json borell = Json::array();
  for (int i = 0; i < report.dim; ++i) borell.push_back(borell_ratio(report, i));
  results["borell_ratios"] = borell;

  const SandwichResult sw = sandwich_check(1.0, std::sqrt(report.dim), report);
  results["sandwich"] = {{"sigma2", sw.sigma2},
                         {"ratio", sw.ratio},
                         {"structural", sw.structural},
                         {"c1_envelope", sw.c1_envelope},
                         {"c2_envelope", sw.c2_envelope}};

  emit_json(opt, "moments", results);
  return 0;
}

int run_verify_snc(const Options& opt) {
  if (kBodyNames.at(opt.body) != CliBody::cube_proj)
    throw UsageError("verify-snc applies to --body cube-proj");

  const int lo = opt.n_min > 0 ? opt.n_min : opt.n;
  const int hi = opt.n_max > 0 ? opt.n_max : opt.n;
  if (lo < 3 || hi < lo) throw UsageError("need 3 <= n-min <= n-max");
  const int trials = opt.trials > 0 ? opt.trials : 1000;

  double worst = -std::numeric_limits<double>::infinity();
  Json per_n = Json::array();
  for (int n = lo; n <= hi; ++n) {
    RngStream rng(opt.seed, 700 + static_cast<std::uint64_t>(n));
    double max_gap = -std::numeric_limits<double>::infinity();
    for (int t = 0; t < trials; ++t) {
      const UnitDirection theta = random_unit(n, rng);
      const std::vector<double> eta1 = random_unit_orthogonal(theta, {}, rng);
      const std::vector<double> eta2 = random_unit_orthogonal(theta, {eta1}, rng);
      max_gap = std::max(max_gap, cube_proj_snc_gap(theta, eta1, eta2));
    }
    per_n.push_back({{"n", n}, {"trials", trials}, {"max_gap", max_gap}});
    worst = std::max(worst, max_gap);
  }

  Json results;
  results["per_n"] = per_n;
  results["max_gap"] = worst;
  results["tolerance"] = 1e-12;
  results["pass"] = worst <= 1e-12;
  emit_json(opt, "verify-snc", results);

  if (worst > 1e-12) {
    std::cerr << "error: negative-correlation gap " << fmt17(worst) << " exceeds 1e-12\n";
    return 2;
  }
  return 0;
}

struct SweepRow {
  int n = 0;
  std::string body;
  std::string hash;
  ConjectureReport report;
};

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out =
      "n,body,theta_hash,e_x2,var_x2,lambda2,variance_ratio,ratio_se,sigma,"
      "thin_shell_ratio,b2,a_eta,n3_var\n";
  for (const SweepRow& row : rows) {
    const ConjectureReport& r = row.report;
    const double n3 = static_cast<double>(row.n) * row.n * row.n * r.var_x2;
    out += std::to_string(row.n) + "," + row.body + "," + row.hash + "," + fmt17(r.e_x2) +
           "," + fmt17(r.var_x2) + "," + fmt17(r.lambda2) + "," + fmt17(r.variance_ratio) +
           "," + fmt17(r.variance_ratio_se) + "," + fmt17(r.sigma) + "," +
           fmt17(r.thin_shell_ratio) + "," + fmt17(r.b2) + "," + fmt17(r.a_eta) + "," +
           fmt17(n3) + "\n";
  }
  return out;
}

int run_sweep(const Options& opt) {
  const CliBody body = kBodyNames.at(opt.body);
  const int lo = opt.n_min > 0 ? opt.n_min : opt.n;
  const int hi = opt.n_max > 0 ? opt.n_max : opt.n;
  if (lo < 2 || hi < lo) throw UsageError("need 2 <= n-min <= n-max");
  if (opt.theta != "random" && lo != hi)
    throw UsageError("an explicit theta requires a single n");

  std::vector<SweepRow> rows;
  for (int n = lo; n <= hi; ++n) {
    Options local = opt;
    local.n = n;
    local.theta_stream = 500 + static_cast<std::uint64_t>(n);
    const BodySampler sampler = make_body_sampler(body, n, local);

    AccumulatorConfig cfg;
    cfg.dim = sampler.dim;
    cfg.basis = canonical_basis(sampler.dim);
    cfg.pair_sums = false;  // A(eta) recovered through the decomposition identity
    cfg.batches = opt.batches;

    const MomentAccumulator acc = accumulate_stream(
        cfg, opt.samples, opt.threads, opt.seed,
        10000 + static_cast<std::uint64_t>(n) * 256, sampler.factory);

    SweepRow row;
    row.n = n;
    row.body = opt.body;
    row.hash = sampler.has_theta ? theta_hash(sampler.theta.coords)
                                 : theta_hash(std::span<const double>{});
    row.report = acc.finalize();
    check_report_identities(row.report);
    rows.push_back(std::move(row));
  }

  const std::string format = opt.format.empty() ? "csv" : opt.format;
  if (format == "csv") {
    write_output(opt, sweep_csv(rows));
  } else if (format == "json") {
    Json arr = Json::array();
    for (const SweepRow& row : rows) {
      Json j = report_to_json(row.report);
      j["n"] = row.n;
      j["body"] = row.body;
      j["theta_hash"] = row.hash;
      j["n3_var"] = static_cast<double>(row.n) * row.n * row.n * row.report.var_x2;
      arr.push_back(std::move(j));
    }
    Json results;
    results["rows"] = arr;
    emit_json(opt, "sweep", results);
  } else {
    throw UsageError("unknown format '" + format + "'");
  }
  return 0;
}

int run_rotate(const Options& opt) {
  if (kBodyNames.at(opt.body) != CliBody::cube)
    throw UsageError("rotate requires the isotropic --body cube source");
  const int n = opt.n;
  if (n < 2) throw UsageError("need n >= 2");
  const int rotations = opt.trials > 0 ? opt.trials : 16;

  // Reference anisotropic map: identity except the last axis streched
  // by 10, the worked comparison case for rotation averaging.
  std::vector<double> diag(n, 1.0);
  diag[n - 1] = 10.0;
  const Matrix t = diagonal_matrix(diag);

  const SamplerFn base = [n](RngStream& rng, std::span<double> x) {
    const double root3 = std::sqrt(3.0);
    for (int i = 0; i < n; ++i) x[i] = root3 * (2.0 * rng.uniform01() - 1.0);
  };

  const RotationSummary summary =
      rotation_average_experiment(t, base, rotations, opt.samples, opt.seed);

  double max_e_err = 0.0, max_l_err = 0.0;
  Json per = Json::array();
  for (std::size_t j = 0; j < summary.e_x2.size(); ++j) {
    per.push_back({{"e_x2", summary.e_x2[j]},
                   {"var_x2", summary.var_x2[j]},
                   {"lambda2", summary.lambda2[j]}});
    max_e_err = std::max(max_e_err, std::abs(summary.e_x2[j] - summary.hs2) / summary.hs2);
    max_l_err = std::max(max_l_err, std::abs(summary.lambda2[j] - summary.op2) / summary.op2);
  }

  Json results;
  results["n"] = n;
  results["rotations"] = rotations;
  results["op2"] = summary.op2;
  results["hs2"] = summary.hs2;
  results["per_rotation"] = per;
  results["avg_var"] = summary.avg_var;
  results["avg_ratio"] = summary.avg_ratio;
  results["max_e_x2_rel_err"] = max_e_err;
  results["max_lambda2_rel_err"] = max_l_err;
  emit_json(opt, "rotate", results);
  return 0;
}

int run_oracle_compare(const Options& opt) {
  const CliBody body = kBodyNames.at(opt.body);
  if (!is_projection_body(body))
    throw UsageError("oracle-compare applies to projection bodies");

  const UnitDirection theta = resolve_theta(opt);
  const int n = theta.n;
  if (n > 4) throw UsageError("the hull oracle needs n <= 4");
  const HyperplaneFrame frame = hyperplane_frame(theta);
  const ProjectedBody pbody =
      body == CliBody::cube_proj ? ProjectedBody::cube : ProjectedBody::cross;
  const OracleMoments oracle(pbody, theta, frame);

  constexpr double kTol = 1e-9;
  bool ok = true;
  Json results;
  results["n"] = n;
  results["body"] = opt.body;
  results["theta"] = theta.coords;
  results["theta_hash"] = theta_hash(theta.coords);

  const double vol_closed =
      body == CliBody::cube_proj ? cube_proj_volume(theta) : cross_proj_volume(theta);
  const double vol_delta = std::abs(vol_closed - oracle.volume()) / oracle.volume();
  results["volume_closed"] = vol_closed;
  results["volume_oracle"] = oracle.volume();
  results["volume_rel_delta"] = vol_delta;
  ok = ok && vol_delta <= kTol;

  double e2_closed = 0.0;
  if (body == CliBody::cube_proj) {
    for (const auto& b : frame.basis) e2_closed += cube_proj_second_moment(theta, b);
  } else {
    e2_closed = cross_proj_mean_square(theta);
  }
  const double e2_delta = std::abs(e2_closed - oracle.e_x2());
  results["e_x2_closed"] = e2_closed;
  results["e_x2_oracle"] = oracle.e_x2();
  results["e_x2_delta"] = e2_delta;
  ok = ok && e2_delta <= kTol;

  if (body == CliBody::cube_proj) {
    RngStream rng(opt.seed, 40);
    double max_second = 0.0, max_fourth = 0.0;
    for (int k = 0; k < 8; ++k) {
      const std::vector<double> eta1 = random_unit_orthogonal(theta, {}, rng);
      const std::vector<double> eta2 = random_unit_orthogonal(theta, {eta1}, rng);
      const std::vector<double> c1 = project_to_frame(eta1, frame);
      const std::vector<double> c2 = project_to_frame(eta2, frame);
      max_second = std::max(max_second, std::abs(cube_proj_second_moment(theta, eta1) -
                                                 oracle.directional_second(c1)));
      max_fourth = std::max(max_fourth, std::abs(cube_proj_mixed_fourth(theta, eta1, eta2) -
                                                 oracle.directional_mixed_fourth(c1, c2)));
    }
    results["second_moment_max_delta"] = max_second;
    results["mixed_fourth_max_delta"] = max_fourth;
    ok = ok && max_second <= kTol && max_fourth <= kTol;
  }

  // Monte-Carlo cross-check of the oracle values.
  const BodySampler sampler = make_body_sampler(body, n, opt);
  AccumulatorConfig cfg;
  cfg.dim = sampler.dim;
  cfg.batches = opt.batches;
  cfg.pair_sums = false;
  const MomentAccumulator acc = accumulate_stream(
      cfg, opt.samples, opt.threads, opt.seed,
      10000 + static_cast<std::uint64_t>(n) * 256, sampler.factory);
  const ConjectureReport report = acc.finalize();

  const double e2_mc_delta = std::abs(report.e_x2 - oracle.e_x2());
  const double var_mc_delta = std::abs(report.var_x2 - oracle.var_x2());
  results["e_x2_mc"] = report.e_x2;
  results["e_x2_mc_se"] = report.e_x2_se;
  results["var_x2_mc"] = report.var_x2;
  results["var_x2_mc_se"] = report.var_x2_se;
  results["e_x2_mc_within_4se"] = e2_mc_delta <= 4.0 * report.e_x2_se;
  results["var_x2_mc_within_4se"] = var_mc_delta <= 4.0 * report.var_x2_se;
  ok = ok && e2_mc_delta <= 4.0 * report.e_x2_se && var_mc_delta <= 4.0 * report.var_x2_se;

  results["pass"] = ok;
  emit_json(opt, "oracle-compare", results);
  if (!ok) {
    std::cerr << "error: oracle comparison outside tolerance\n";
    return 2;
  }
  return 0;
}

int run_volume(const Options& opt) {
  const CliBody body = kBodyNames.at(opt.body);
  if (!is_projection_body(body))
    throw UsageError("volume applies to projection bodies");

  const UnitDirection theta = resolve_theta(opt);
  const double closed =
      body == CliBody::cube_proj ? cube_proj_volume(theta) : cross_proj_volume(theta);

  Json results;
  results["n"] = theta.n;
  results["body"] = opt.body;
  results["theta"] = theta.coords;
  results["theta_hash"] = theta_hash(theta.coords);
  results["volume"] = closed;

  bool ok = true;
  if (theta.n - 1 <= 3) {
    const HyperplaneFrame frame = hyperplane_frame(theta);
    const ProjectedBody pbody =
        body == CliBody::cube_proj ? ProjectedBody::cube : ProjectedBody::cross;
    const HullModel hull = convex_hull(projected_vertices(pbody, theta, frame), theta.n - 1);
    const double delta = std::abs(closed - hull.volume) / hull.volume;
    results["volume_oracle"] = hull.volume;
    results["volume_rel_delta"] = delta;
    ok = delta <= 1e-9;
  }

  emit_json(opt, "volume", results);
  if (!ok) {
    std::cerr << "error: volume disagrees with the hull oracle\n";
    return 2;
  }
  return 0;
}

void add_common_options(CLI::App* cmd, Options& opt) {
  cmd->add_option("--body", opt.body, "target body")
      ->check(CLI::IsMember({"cube-proj", "cross-proj", "cube", "simplex"}));
  cmd->add_option("--n", opt.n, "ambient dimension");
  cmd->add_option("--n-min", opt.n_min, "sweep lower dimension");
  cmd->add_option("--n-max", opt.n_max, "sweep upper dimension");
  cmd->add_option("--theta", opt.theta, "direction: random|axis:i|coords:a,b,...|file:path");
  cmd->add_option("--samples", opt.samples, "Monte-Carlo sample count");
  cmd->add_option("--seed", opt.seed, "base RNG seed");
  cmd->add_option("--batches", opt.batches, "batch count for error bars");
  cmd->add_option("--trials", opt.trials, "trial count (triples or rotations)");
  cmd->add_option("--out", opt.out, "output path (default stdout)");
  cmd->add_option("--format", opt.format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--threads", opt.threads, "worker threads");
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"moment and variance toolkit for hyperplane shadows of polytopes"};
  app.name("polyvar");

  Options opt;
  opt.argv_echo = args;

  CLI::App* moments = app.add_subcommand("moments", "sample a body and report moment statistics");
  CLI::App* verify = app.add_subcommand("verify-snc", "check the negative-correlation gap");
  CLI::App* sweep = app.add_subcommand("sweep", "scan a dimension range");
  CLI::App* rotate = app.add_subcommand("rotate", "average the variance over random rotations");
  CLI::App* oracle = app.add_subcommand("oracle-compare", "closed forms against the hull oracle");
  CLI::App* volume = app.add_subcommand("volume", "projected volume");
  for (CLI::App* cmd : {moments, verify, sweep, rotate, oracle, volume})
    add_common_options(cmd, opt);
  app.require_subcommand(1);

  std::vector<const char*> argv;
  argv.push_back("polyvar");
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 1;
  }

  for (CLI::App* cmd : {moments, verify, sweep, rotate, oracle, volume})
    if (cmd->parsed() && cmd->count("--n") > 0) opt.n_explicit = true;

  try {
    if (opt.n < 2) throw UsageError("need n >= 2");
    if (opt.samples < 2) throw UsageError("need at least two samples");
    if (opt.threads < 1 || opt.threads > 64) throw UsageError("threads must be in [1, 64]");
    if (opt.batches < 2 || opt.batches > 4096) throw UsageError("batches must be in [2, 4096]");

    if (moments->parsed()) return run_moments(opt);
    if (verify->parsed()) return run_verify_snc(opt);
    if (sweep->parsed()) return run_sweep(opt);
    if (rotate->parsed()) return run_rotate(opt);
    if (oracle->parsed()) return run_oracle_compare(opt);
    return run_volume(opt);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code() == errc::io_error ? 1 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace polyvar
