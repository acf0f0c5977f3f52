// Command-line front end. Exit status: 0 success, 1 a check failed,
// 2 usage or input error (one line on stderr: "error: <kind>: <message>").

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "smallball/error.hpp"
#include "smallball/extremal.hpp"
#include "smallball/rearrange.hpp"
#include "smallball/sbd_io.hpp"
#include "smallball/sumdist.hpp"
#include "smallball/sweeps.hpp"
#include "smallball/verify.hpp"

using namespace smallball;

namespace {

struct Options {
  std::size_t d = 1;
  std::size_t n = 0;
  std::vector<double> ks;
  std::size_t resolution = 0;
  double set_volume = 0.0;
  bool exact_check = false;
  std::uint64_t seed = 1;
  std::size_t seeds = 0;
  std::size_t samples = 100000;
  std::size_t count = 0;
  double lo = -2.0;
  double hi = 2.0;
  std::string kind = "random";
  std::string shape = "multi-bump";
  std::string method = "auto";
  std::vector<std::string> inputs;
  std::string mask;
  std::string coefficients;
  std::string output;
  std::string p1_out;
  std::string p2_out;
  double y = 0.0;
  double delta = 0.0;
  std::string check;
};

void emit(const Options& o, const std::string& text) {
  if (o.output.empty()) {
    std::cout << text;
  } else {
    write_file_atomic(o.output, text);
  }
}

std::size_t resolution_for(const Options& o) { return o.resolution ? o.resolution : default_resolution(o.d); }

std::vector<double> ks_for(const Options& o, std::size_t n) {
  if (o.ks.empty()) throw PreconditionError("--k is required");
  if (o.ks.size() == 1 && n > 1) return std::vector<double>(n, o.ks[0]);
  if (n != 0 && o.ks.size() != n) {
    throw PreconditionError("--k given " + std::to_string(o.ks.size()) + " times for n = " + std::to_string(n));
  }
  return o.ks;
}

std::vector<GridDensity> load_inputs(const Options& o) {
  if (o.inputs.empty()) throw PreconditionError("--input is required");
  std::vector<GridDensity> fs;
  for (const auto& p : o.inputs) fs.push_back(load_density(p));
  return fs;
}

std::string real(double x) { return format_real(x); }

int run_gen(const Options& o) {
  if (o.d == 0) throw PreconditionError("--d must be at least 1");
  std::ostringstream out;
  if (o.kind == "uniform-ball") {
    const std::vector<double> ks = ks_for(o, 1);
    const double h = extremal_cell_width(o.d, ks, resolution_for(o));
    write_density(out, uniform_ball_density(o.d, ks[0], extremal_spec(o.d, ks[0], h)));
  } else {
    if (!(o.lo < o.hi)) throw PreconditionError("--lo must be below --hi");
    const std::size_t count = o.count ? o.count : (o.d == 1 ? 64 : o.d == 2 ? 32 : 16);
    const GridSpec spec(std::vector<Interval>(o.d, Interval{o.lo, o.hi}), std::vector<std::size_t>(o.d, count));
    if (o.kind == "random") {
      const std::vector<double> ks = ks_for(o, 1);
      write_density(out, generate_bounded_density({o.d, ks[0], spec, o.seed, parse_shape(o.shape)}));
    } else if (o.kind == "ball-mask") {
      if (!(o.set_volume > 0.0)) throw PreconditionError("--set-volume must be positive for a ball mask");
      write_mask(out, centered_ball_mask(spec, o.set_volume));
    } else {
      throw PreconditionError("--kind must be random, uniform-ball or ball-mask");
    }
  }
  emit(o, out.str());
  return 0;
}

int run_rearrange(const Options& o) {
  if (o.inputs.size() != 1) throw PreconditionError("rearrange takes exactly one --input");
  std::ostringstream out;
  write_density(out, symmetric_decreasing_rearrangement(load_density(o.inputs[0])));
  emit(o, out.str());
  return 0;
}

int run_convolve(const Options& o) {
  const std::vector<GridDensity> fs = load_inputs(o);
  ConvolutionMethod m = ConvolutionMethod::automatic;
  if (o.method == "direct") {
    m = ConvolutionMethod::direct;
  } else if (o.method == "fft") {
    m = ConvolutionMethod::fft;
  } else if (o.method != "auto") {
    throw PreconditionError("--method must be auto, direct or fft");
  }
  std::ostringstream out;
  write_density(out, sum_density(fs, m));
  emit(o, out.str());
  return 0;
}

int run_bound(const Options& o) {
  const std::vector<double> ks = ks_for(o, 0);
  const std::size_t res = resolution_for(o);
  const bool prob = o.set_volume > 0.0;
  const BoundResult r = prob ? rogozin_bound_prob(o.d, ks, o.set_volume, res, o.exact_check)
                             : rogozin_bound_density(o.d, ks, res, o.exact_check);
  std::ostringstream out;
  out << "quantity,value,budget,lower_gap,upper_gap,exact,exact_consistent\n"
      << (prob ? "probability" : "max_density") << ',' << real(r.value) << ',' << real(r.budget) << ','
      << real(r.lower_gap) << ',' << real(r.upper_gap) << ',' << (r.exact ? real(*r.exact) : std::string()) << ','
      << (r.exact ? (r.exact_consistent ? "1" : "0") : "") << '\n';
  emit(o, out.str());
  return r.exact_consistent ? 0 : 1;
}

int run_check(const Options& o) {
  std::vector<VerificationReport> reports;
  const bool sweep_mode = o.seeds > 0;
  if (sweep_mode && !o.inputs.empty()) throw PreconditionError("use either --seeds or --input, not both");
  const std::string& c = o.check;
  if (c == "theorem1" || c == "corollary") {
    if (sweep_mode) {
      if (o.n == 0) throw PreconditionError("--n is required with --seeds");
      const std::vector<double> ks = o.ks.empty() ? std::vector<double>{} : ks_for(o, o.n);
      reports = c == "theorem1" ? sweep_theorem1(o.d, o.n, o.seeds, o.seed, resolution_for(o), ks)
                                : sweep_corollary(o.d, o.n, o.seeds, o.seed, resolution_for(o), ks);
    } else {
      const std::vector<GridDensity> fs = load_inputs(o);
      const std::vector<double> ks = ks_for(o, fs.size());
      Options dd = o;
      dd.d = fs[0].spec().dim();
      if (c == "theorem1") {
        if (o.mask.empty()) throw PreconditionError("--mask is required");
        reports.push_back(check_theorem1(fs, ks, load_mask(o.mask), resolution_for(dd)));
      } else {
        reports.push_back(check_corollary(fs, ks, resolution_for(dd)));
      }
    }
  } else if (c == "bll") {
    if (sweep_mode) {
      reports = sweep_bll(o.seeds, o.seed);
    } else {
      if (o.coefficients.empty()) throw PreconditionError("--coefficients is required");
      const CoefficientMatrix a = load_coefficients(o.coefficients);
      reports.push_back(check_bll(load_inputs(o), a, a.cols()));
    }
  } else if (c == "bridge") {
    if (!sweep_mode) throw PreconditionError("check bridge needs --seeds");
    reports = sweep_bridge(o.seeds, o.seed);
  } else if (c == "decompose") {
    if (sweep_mode) {
      reports = sweep_decompose(o.seeds, o.seed);
    } else {
      if (o.inputs.size() != 1) throw PreconditionError("check decompose takes exactly one --input");
      const Decomposition dec = extreme_point_decompose(load_density(o.inputs[0]), ks_for(o, 1)[0], o.y, o.delta);
      for (const auto& [path, g] : {std::pair{o.p1_out, &dec.p1}, std::pair{o.p2_out, &dec.p2}}) {
        if (path.empty()) continue;
        std::ostringstream s;
        write_density(s, *g);
        write_file_atomic(path, s.str());
      }
      reports.push_back(dec.report);
    }
  } else {
    throw PreconditionError("unknown check '" + c + "'");
  }
  emit(o, to_csv(reports));
  for (const auto& r : reports) {
    if (!r.passed) return 1;
  }
  return 0;
}

int run_sample(const Options& o) {
  if (o.mask.empty()) throw PreconditionError("--mask is required");
  if (o.samples == 0) throw PreconditionError("--samples must be at least 1");
  const std::vector<GridDensity> fs = load_inputs(o);
  const RegionMask s = load_mask(o.mask);
  const MonteCarloEstimate mc = monte_carlo_sum_prob(fs, s, o.samples, o.seed);
  const SmallBallBracket b = small_ball_bracket(fs, s);
  std::ostringstream out;
  out << "estimate,stderr,samples,seed,grid_value,grid_lower,grid_upper\n"
      << real(mc.estimate) << ',' << real(mc.standard_error) << ',' << o.samples << ',' << o.seed << ','
      << real(b.value) << ',' << real(b.lower) << ',' << real(b.upper) << '\n';
  emit(o, out.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Small-ball probabilities of sums of bounded-density random vectors on grids.\n"
               "Environment: SMALLBALL_THREADS sets sweep worker threads (never changes results)."};
  app.require_subcommand(1);
  Options o;
  const std::string res_help = "cells across the widest extremal ball (default 512 for d=1, 128 for d=2, 32 for d>=3)";

  auto* gen = app.add_subcommand("gen", "write a random bounded density, a uniform ball, or a centered ball mask");
  gen->add_option("--kind", o.kind, "random | uniform-ball | ball-mask")->capture_default_str();
  gen->add_option("--d", o.d, "dimension")->capture_default_str();
  gen->add_option("--k", o.ks, "density bound K");
  gen->add_option("--shape", o.shape, "multi-bump | random-cells | indicator-union")->capture_default_str();
  gen->add_option("--seed", o.seed, "generator seed")->capture_default_str();
  gen->add_option("--count", o.count, "cells per axis (default 64, 32, 16 for d = 1, 2, >=3)");
  gen->add_option("--lo", o.lo, "lower grid edge on every axis")->capture_default_str();
  gen->add_option("--hi", o.hi, "upper grid edge on every axis")->capture_default_str();
  gen->add_option("--set-volume", o.set_volume, "ball-mask volume");
  gen->add_option("--resolution", o.resolution, res_help);
  gen->add_option("--output", o.output, "output SBD file (default stdout)");

  auto* rea = app.add_subcommand("rearrange", "symmetric decreasing rearrangement of an SBD density");
  rea->add_option("--input", o.inputs, "input SBD density")->required();
  rea->add_option("--output", o.output, "output SBD file (default stdout)");

  auto* con = app.add_subcommand("convolve", "density of the sum of independent SBD densities");
  con->add_option("--input", o.inputs, "input SBD density (repeat)")->required();
  con->add_option("--method", o.method, "auto | direct | fft")->capture_default_str();
  con->add_option("--output", o.output, "output SBD file (default stdout)");

  auto* bnd = app.add_subcommand("bound", "extremal bound: P(U_1+...+U_n in B) with --set-volume, else M(U_1+...+U_n)");
  bnd->add_option("--d", o.d, "dimension")->capture_default_str();
  bnd->add_option("--k", o.ks, "K_i, repeat once per variable")->required();
  bnd->add_option("--set-volume", o.set_volume, "volume of the centered ball B");
  bnd->add_option("--resolution", o.resolution, res_help);
  bnd->add_flag("--exact-check", o.exact_check, "compare with the exact piecewise-polynomial oracle (d=1)");
  bnd->add_option("--output", o.output, "output CSV file (default stdout)");

  auto* chk = app.add_subcommand("check", "verification reports as CSV");
  chk->add_option("check", o.check, "theorem1 | corollary | bll | bridge | decompose")->required();
  chk->add_option("--d", o.d, "dimension (sweeps)")->capture_default_str();
  chk->add_option("--n", o.n, "number of summands (sweeps)");
  chk->add_option("--k", o.ks, "K_i, repeat once per variable, or once for all (sweeps default: random from {0.5,1,4})");
  chk->add_option("--seeds", o.seeds, "run a seeded sweep of this many instances");
  chk->add_option("--seed", o.seed, "base seed (instance i uses a seed derived from it)")->capture_default_str();
  chk->add_option("--resolution", o.resolution, res_help);
  chk->add_option("--input", o.inputs, "SBD densities for a single check (repeat)");
  chk->add_option("--mask", o.mask, "SBD mask (theorem1)");
  chk->add_option("--coefficients", o.coefficients, "coefficient matrix file (bll)");
  chk->add_option("--y", o.y, "level y (decompose)");
  chk->add_option("--delta", o.delta, "delta (decompose)");
  chk->add_option("--p1", o.p1_out, "write p1 here (decompose)");
  chk->add_option("--p2", o.p2_out, "write p2 here (decompose)");
  chk->add_option("--output", o.output, "output CSV file (default stdout)");

  auto* smp = app.add_subcommand("sample", "Monte Carlo estimate of P(X_1+...+X_n in S) next to the grid bracket");
  smp->add_option("--input", o.inputs, "SBD density (repeat)")->required();
  smp->add_option("--mask", o.mask, "SBD mask")->required();
  smp->add_option("--samples", o.samples, "number of samples")->capture_default_str();
  smp->add_option("--seed", o.seed, "sampler seed")->capture_default_str();
  smp->add_option("--output", o.output, "output CSV file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::string msg = e.what();
    for (char& ch : msg) {
      if (ch == '\n') ch = ' ';
    }
    std::fprintf(stderr, "error: usage: %s\n", msg.c_str());
    return 2;
  }

  try {
    if (*gen) return run_gen(o);
    if (*rea) return run_rearrange(o);
    if (*con) return run_convolve(o);
    if (*bnd) return run_bound(o);
    if (*chk) return run_check(o);
    if (*smp) return run_sample(o);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s: %s\n", e.kind(), e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: internal: %s\n", e.what());
    return 2;
  }
  return 2;
}
