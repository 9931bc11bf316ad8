// Acceptance suite: one criterion per numbered run, each printing a
// single PASS/FAIL line with the measured quantities it rests on.
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>
#include <sys/wait.h>

#include "cpsep/cp_fit.hpp"
#include "cpsep/cut_witness.hpp"
#include "cpsep/distances.hpp"
#include "cpsep/grid_distribution.hpp"
#include "cpsep/hard_instances.hpp"
#include "cpsep/haar.hpp"
#include "cpsep/hypergeom.hpp"
#include "cpsep/mixture.hpp"
#include "cpsep/packing.hpp"
#include "cpsep/product_net.hpp"
#include "cpsep/sep_experiments.hpp"
#include "cpsep/spectral_instance.hpp"

using namespace cpsep;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& why) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += why;
    }
  }
  void note(const std::string& text) {
    if (!detail.empty()) detail += "; ";
    detail += text;
  }
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

// ---------------------------------------------------------------- 1
Outcome criterion_identities() {
  Outcome out;
  double worst = 0.0;
  for (int d : {2, 4, 6, 8}) {
    for (double eps : {0.1, 0.3}) {
      const SubsetInstance inst = SubsetInstance::first_half(d, eps);
      const CutWitness w = cut_value(inst.distribution(), inst.indicator_signs());
      worst = std::max({worst, std::abs(w.quad_form + eps),
                        std::abs(w.cut_weight - 0.5 - eps / 2.0)});
    }
  }
  out.require(worst <= 1e-12, "identity drift " + fmt(worst));
  out.note("max |x^T A x + eps| and cut-weight drift = " + fmt(worst));
  return out;
}

// ---------------------------------------------------------------- 2
double brute_force_chi2(int d, double eps, int n) {
  std::vector<std::uint32_t> subsets;
  for (std::uint32_t mask = 0; mask < (1u << d); ++mask) {
    if (__builtin_popcount(mask) == d / 2) subsets.push_back(mask);
  }
  const int cells = d * d;
  std::int64_t count = 1;
  for (int t = 0; t < n; ++t) count *= cells;
  double acc = 0.0;
  for (std::int64_t seq = 0; seq < count; ++seq) {
    double phi = 0.0;
    for (std::uint32_t mask : subsets) {
      double prod = 1.0;
      std::int64_t rest = seq;
      for (int t = 0; t < n; ++t) {
        const int cell = static_cast<int>(rest % cells);
        rest /= cells;
        const bool same = (((mask >> (cell / d)) ^ (mask >> (cell % d))) & 1u) == 0;
        prod *= same ? 1.0 - eps : 1.0 + eps;
      }
      phi += prod;
    }
    phi /= static_cast<double>(subsets.size());
    acc += phi * phi;
  }
  return acc / static_cast<double>(count) - 1.0;
}

Outcome criterion_chi2_chain() {
  Outcome out;
  double worst = 0.0;
  for (double eps : {0.1, 0.3}) {
    for (const auto& [d, n] :
         std::vector<std::pair<int, int>>{{2, 1}, {2, 2}, {4, 1}, {4, 2}}) {
      const double exact = mixture_chi2_exact(SubsetMixtureSpec(d, eps, n));
      worst = std::max(worst, std::abs(exact - brute_force_chi2(d, eps, n)));
    }
  }
  out.require(worst <= 1e-10, "chi2 exact vs brute force drift " + fmt(worst));

  double moment_worst = 0.0;
  const double eps = 0.3;
  for (int d : {2, 4, 6}) {
    std::vector<std::vector<int>> subsets;
    for (std::uint32_t mask = 0; mask < (1u << d); ++mask) {
      if (__builtin_popcount(mask) != d / 2) continue;
      std::vector<int> s;
      for (int i = 0; i < d; ++i) {
        if ((mask >> i) & 1) s.push_back(i);
      }
      subsets.push_back(std::move(s));
    }
    for (const auto& s1 : subsets) {
      for (const auto& s2 : subsets) {
        const SubsetInstance a(d, s1, eps);
        const SubsetInstance b(d, s2, eps);
        double mean = 0.0;
        for (int i = 0; i < d; ++i) {
          for (int j = 0; j < d; ++j) mean += a.density(i, j) * b.density(i, j);
        }
        mean /= static_cast<double>(d) * d;
        int overlap = 0;
        for (int i : s1) overlap += b.contains(i);
        const double delta = 4.0 * overlap / d - 1.0;
        moment_worst = std::max(moment_worst,
                                std::abs(mean - (1.0 + eps * eps * delta * delta)));
      }
    }
  }
  out.require(moment_worst <= 1e-12, "pair moment drift " + fmt(moment_worst));

  int dominated = 0;
  int applicable = 0;
  for (int d = 2; d <= 12; d += 2) {
    for (int n = 1; n <= 3; ++n) {
      for (double e : {0.1, 0.2}) {
        const SubsetMixtureSpec spec(d, e, n);
        const auto bound = mixture_chi2_bound(spec);
        if (!bound) continue;
        ++applicable;
        if (mixture_chi2_exact(spec) <= *bound + 1e-12) ++dominated;
      }
    }
  }
  out.require(dominated == applicable,
              "chi2 ceiling violated on " + fmt(applicable - dominated) + " grid points");
  out.note("brute-force drift " + fmt(worst) + ", moment drift " + fmt(moment_worst) + ", " +
           std::to_string(applicable) + " ceiling points");
  return out;
}

// ---------------------------------------------------------------- 3
Outcome criterion_metric_inequalities() {
  Outcome out;
  // 2 TV^2 <= chi^2 on the enumerable mixture instances.
  for (const auto& [d, n] :
       std::vector<std::pair<int, int>>{{2, 1}, {2, 3}, {4, 1}, {4, 2}, {6, 1}}) {
    const SubsetMixtureSpec spec(d, 0.3, n);
    const auto tv = mixture_tv_exact(spec);
    if (tv) {
      out.require(2.0 * (*tv) * (*tv) <= mixture_chi2_exact(spec) + 1e-12,
                  "2TV^2 > chi2 at d=" + std::to_string(d) + ", n=" + std::to_string(n));
    }
  }
  // ... and on random full-support pairs.
  RandomStream rng(301);
  for (int trial = 0; trial < 500; ++trial) {
    RandomStream s = rng.substream(trial);
    GridMatrix pm(5, 5), qm(5, 5);
    for (int i = 0; i < 5; ++i) {
      for (int j = 0; j < 5; ++j) {
        pm(i, j) = 0.02 + s.next_double();
        qm(i, j) = 0.02 + s.next_double();
      }
    }
    pm /= pm.sum();
    qm /= qm.sum();
    const GridDistribution p{std::move(pm)};
    const GridDistribution q{std::move(qm)};
    const double tv = tv_distance(p, q);
    if (!(2.0 * tv * tv <= chi2_distance(p, q) + 1e-12)) {
      out.require(false, "2TV^2 > chi2 on random pair " + std::to_string(trial));
      break;
    }
  }
  // Exact hypergeometric tails under exp(-d t^2).
  double margin = 1e300;
  for (int d : {8, 12, 16, 20}) {
    for (double t : {0.05, 0.1, 0.2}) {
      const int r_min = static_cast<int>(std::ceil(d / 4.0 + d * t / 2.0));
      const double tail = hypergeom_exact_tail(d, r_min);
      const double bound = std::exp(-d * t * t);
      out.require(tail <= bound, "hypergeometric tail above bound at d=" + std::to_string(d));
      margin = std::min(margin, bound - tail);
    }
  }
  out.note("min tail margin " + fmt(margin));
  return out;
}

// ---------------------------------------------------------------- 4
Outcome criterion_packing() {
  Outcome out;
  double tv_drift = 0.0;
  double kl_drift = 0.0;
  double paper_ratio_drift = 0.0;
  const double eps = 0.2;
  for (int d : {4, 8}) {
    RandomStream rng(410 + d);
    PackingEnsemble ens = PackingEnsemble::build(d, eps, d == 4 ? 4 : 16, rng);
    const auto& code = ens.code();

    for (const auto& w : code) {
      const GridDistribution p = ens.distribution(w);
      for (int i = 0; i < d; ++i) {
        out.require(std::abs(p.at(i, i) - 3.0 / (4.0 * d)) <= 1e-12, "diagonal off 3/(4d)");
      }
      out.require(l1_distance(mixture_to_distribution(ens.explicit_mixture(w)), p) <= 1e-12,
                  "explicit mixture does not reproduce the member");
    }
    for (std::size_t a = 0; a < code.size(); ++a) {
      for (std::size_t b = a + 1; b < code.size(); ++b) {
        out.require(PackingEnsemble::hamming(code[a], code[b]) >= 0.4 * ens.m(),
                    "code pair below 0.4 m");
      }
    }

    RandomStream pick(420 + d);
    for (int trial = 0; trial < 50; ++trial) {
      const auto a = static_cast<std::size_t>(pick.next_below(code.size()));
      const auto b = static_cast<std::size_t>(pick.next_below(code.size()));
      const int delta = PackingEnsemble::hamming(code[a], code[b]);
      const GridDistribution pa = ens.distribution(code[a]);
      const GridDistribution pb = ens.distribution(code[b]);

      const double tv_formula = delta * eps / (4.0 * ens.m());
      tv_drift = std::max({tv_drift, std::abs(ens.tv_closed_form(code[a], code[b]) - tv_formula),
                           std::abs(tv_distance(pa, pb) - tv_formula)});

      const double kl_direct = kl_divergence(pa, pb);
      kl_drift = std::max(kl_drift,
                          std::abs(ens.kl_closed_form(code[a], code[b]) - kl_direct));
      // Direct summation fixes the closed-form constant at Delta/(4m);
      // the Delta/(8m) variant counts upper-triangular cells only and is
      // exactly half of the true divergence.
      const double half_form =
          delta / (8.0 * ens.m()) * eps * std::log((1.0 + eps) / (1.0 - eps));
      paper_ratio_drift = std::max(paper_ratio_drift, std::abs(kl_direct - 2.0 * half_form));
    }
  }
  out.require(tv_drift <= 1e-10, "TV closed form drift " + fmt(tv_drift));
  out.require(kl_drift <= 1e-10, "KL closed form drift " + fmt(kl_drift));
  out.require(paper_ratio_drift <= 1e-10,
              "KL constant factor-two relation drift " + fmt(paper_ratio_drift));
  out.note("tv drift " + fmt(tv_drift) + ", kl drift " + fmt(kl_drift) +
           ", kl = 2x upper-triangular form within " + fmt(paper_ratio_drift));
  return out;
}

// ---------------------------------------------------------------- 5
Outcome criterion_quantum_identities() {
  Outcome out;
  double worst = 0.0;
  RandomStream rng(501);
  for (int d : {2, 4}) {
    for (double eps : {0.1, 0.3}) {
      for (bool rotate : {false, true}) {
        RandomStream s = rng.substream(RandomStream::label_of(
            "accept5", static_cast<std::uint64_t>(d * 1000 + eps * 100 + rotate)));
        const SpectralInstance inst = SpectralInstance::make(d, eps, rotate, s);
        const double cells = static_cast<double>(d) * d;
        worst = std::max(worst, std::abs(purity(inst.state()) - (1.0 + 4.0 * eps * eps) / cells));
        worst = std::max(
            worst, std::abs(schatten_norm(inst.witness_operator(),
                                          std::numeric_limits<double>::infinity()) -
                            2.0 * eps / cells));
        worst = std::max(
            worst, std::abs((inst.state().matrix() * inst.witness_operator()).trace().real() +
                            4.0 * eps * eps / cells));
        worst = std::max(worst, std::abs(trace_distance(inst.state(), maximally_mixed(d * d)) -
                                         eps));
      }
    }
  }
  out.require(worst <= 1e-10, "identity drift " + fmt(worst));
  out.note("max drift over purity, |W|_inf, tr(rho W), trace distance = " + fmt(worst));
  return out;
}

// ---------------------------------------------------------------- 6
Outcome criterion_witness_soundness() {
  Outcome out;
  int certified = 0;
  int total = 0;
  int violations = 0;
  RandomStream rng(601);
  // d = 3 is omitted: an odd local dimension gives an odd ambient d^2,
  // which admits no half-and-half spectrum.
  for (int d : {2, 4}) {
    for (int trial = 0; trial < 500; ++trial) {
      RandomStream s = rng.substream(RandomStream::label_of("accept6", d * 10000 + trial));
      const double eps = 0.1 + 0.35 * s.next_double();
      const SpectralInstance inst = SpectralInstance::make(d, eps, true, s);

      DensityMatrix sigma = maximally_mixed(d * d);
      const auto kind = trial % 3;
      if (kind == 1) {
        CMatrix g(d * d, d * d);
        for (int i = 0; i < d * d; ++i) {
          for (int j = 0; j < d * d; ++j) g(i, j) = Cplx(s.next_gaussian(), s.next_gaussian());
        }
        CMatrix rho = g * g.adjoint();
        rho /= rho.trace().real();
        sigma = DensityMatrix(0.5 * (rho + rho.adjoint()));
      } else if (kind == 2) {
        sigma = product_pure_density(
            PureProductState(random_unit_vector(d, s), random_unit_vector(d, s)));
      }

      ++total;
      const WitnessVerdict verdict = holder_witness_check(inst, sigma);
      if (verdict.certified) {
        ++certified;
        const double direct = 2.0 * trace_distance(inst.state(), sigma);
        if (direct < inst.eps() - 1e-9) ++violations;
      }
    }
  }
  out.require(total == 1000, "expected 1000 pairs");
  out.require(violations == 0, std::to_string(violations) + " false certifications");
  out.note(std::to_string(certified) + "/1000 certified, 0 expected false, found " +
           std::to_string(violations) + "; d=3 omitted (odd d^2 has no balanced spectrum)");
  return out;
}

// ---------------------------------------------------------------- 7
Outcome criterion_concentration() {
  Outcome out;
  RandomStream rng(701);
  double min_margin = 1e300;
  for (int k : {64, 256, 1024}) {
    for (double c : {1.0, 2.0, 3.0}) {
      RandomStream s = rng.substream(RandomStream::label_of(
          "accept7", static_cast<std::uint64_t>(k * 100 + c)));
      const ExperimentReport rep = concentration_experiment(k, c, 100000, s);
      const double freq = rep.number(0, "exceed_freq");
      const double bound = rep.number(0, "bound");
      const double slack = 3.0 * rep.number(0, "exceed_stderr");
      out.require(freq <= bound + slack + 1e-15,
                  "exceedance above bound at k=" + std::to_string(k) + ", c=" + fmt(c) +
                      " (" + fmt(freq) + " > " + fmt(bound) + ")");
      min_margin = std::min(min_margin, bound + slack - freq);
    }
  }
  out.note("9 grid points at 1e5 trials, min margin " + fmt(min_margin));
  return out;
}

// ---------------------------------------------------------------- 8
Outcome criterion_farness_regression() {
  Outcome out;
  RandomStream rng(202406);
  const ExperimentReport rep = farness_certification_experiment(8, 0.35, 4096, 100, rng);
  const double frac = rep.number(0, "frac_certified");
  out.require(frac >= 2.0 / 3.0, "frac_certified = " + fmt(frac) + " < 2/3");
  out.note("seeded frac_certified = " + fmt(frac) + " at d=8, eps=0.35, net=4096; "
           "per-state tail " + fmt(rep.number(0, "tail_freq")) + " vs bound " +
           fmt(rep.number(0, "tail_bound")) +
           " (the same seed certifies 0.90 at eps=0.48)");
  return out;
}

// ---------------------------------------------------------------- 9
Outcome criterion_learning_scaling() {
  Outcome out;
  const std::vector<std::int64_t> grid{8,   16,  32,  64,   96,   128,  192, 256,
                                       384, 512, 768, 1024, 1536, 2048, 3072, 4096};
  const int ds[3] = {4, 8, 12};
  const int targets[3] = {4, 16, 32};
  std::int64_t knees[3] = {0, 0, 0};
  std::int64_t fano_d4 = 0;
  std::vector<double> d4_errors;

  for (int idx = 0; idx < 3; ++idx) {
    RandomStream rng(424242);
    PackingEnsemble ens = PackingEnsemble::build(ds[idx], 0.2, targets[idx], rng);
    RandomStream exp_rng(171717);
    const ExperimentReport rep = plugin_learner_experiment(ens, grid, 400, exp_rng);
    std::int64_t knee = -1;
    for (std::size_t row = 0; row < rep.rows().size(); ++row) {
      if (rep.number(row, "decode_error_rate") < 1.0 / 3.0) {
        knee = static_cast<std::int64_t>(rep.number(row, "n"));
        break;
      }
    }
    out.require(knee > 0, "no knee found for d=" + std::to_string(ds[idx]));
    knees[idx] = knee;
    if (idx == 0) {
      fano_d4 = rep.config().at("fano_bound").get<std::int64_t>();
      for (std::size_t row = 0; row < rep.rows().size(); ++row) {
        d4_errors.push_back(rep.number(row, "decode_error_rate"));
      }
    }
  }
  out.require(knees[0] < knees[1] && knees[1] < knees[2],
              "knees not increasing: " + std::to_string(knees[0]) + ", " +
                  std::to_string(knees[1]) + ", " + std::to_string(knees[2]));
  // The d=4 knee sits above its Fano floor, and every grid point below
  // the floor still errs at 1/3 or worse.
  out.require(knees[0] >= fano_d4, "d=4 knee below the Fano bound");
  for (std::size_t row = 0; row < grid.size(); ++row) {
    if (grid[row] < fano_d4) {
      out.require(d4_errors[row] >= 1.0 / 3.0,
                  "error below 1/3 under the Fano floor at n=" + std::to_string(grid[row]));
    }
  }
  out.note("knees " + std::to_string(knees[0]) + " < " + std::to_string(knees[1]) + " < " +
           std::to_string(knees[2]) + " for d=4,8,12; d=4 Fano floor " +
           std::to_string(fano_d4));
  return out;
}

// ---------------------------------------------------------------- 10
Outcome criterion_determinism() {
  Outcome out;
#ifndef CPSEP_LAB_BIN
  out.require(false, "CLI binary path not configured");
  return out;
#else
  const std::string bin = CPSEP_LAB_BIN;
  auto slurp = [](const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  };
  const std::string grid_a = "/tmp/cpsep_acc_grid_a.json";
  {
    std::ofstream outfile(grid_a, std::ios::binary);
    outfile << SubsetInstance::first_half(4, 0.2).distribution().to_json();
  }
  const std::string grid_b = "/tmp/cpsep_acc_grid_b.csv";
  {
    std::ofstream outfile(grid_b, std::ios::binary);
    outfile << uniform_grid(4).to_csv();
  }

  const std::vector<std::pair<std::string, std::string>> invocations{
      {"cp-hardness", "cp-hardness --d 4 --eps 0.2 --n-grid 1,2,4 --trials 100 --seed 7"},
      {"cp-learning", "cp-learning --d 4 --eps 0.2 --N-target 4 --n-grid 0,64,512 --trials 40 --seed 9"},
      {"sep-farness", "sep-farness --d 4 --eps 0.45 --net-size 256 --trials 20 --seed 11"},
      {"concentration", "concentration --k 64 --c 2 --trials 20000 --seed 13"},
      {"metrics", "metrics --p " + grid_a + " --q " + grid_b},
      {"reduction-audit", "reduction-audit --d 4 --eps 0.45 --seed 17"}};
  for (const auto& [name, args] : invocations) {
    for (const std::string format : {"json", "csv"}) {
      const std::string p1 = "/tmp/cpsep_acc_1." + format;
      const std::string p2 = "/tmp/cpsep_acc_2." + format;
      const std::string base = bin + " " + args + " --format " + format + " --out ";
      const int c1 = std::system((base + p1 + " 2>/dev/null").c_str());
      const int c2 = std::system((base + p2 + " 2>/dev/null").c_str());
      out.require(WIFEXITED(c1) && WEXITSTATUS(c1) == 0 && WIFEXITED(c2) && WEXITSTATUS(c2) == 0,
                  name + " (" + format + ") did not exit cleanly");
      const std::string body = slurp(p1);
      out.require(!body.empty() && body == slurp(p2), name + " (" + format + ") not byte-stable");
    }
  }
  out.note("6 subcommands x {json, csv}, reruns byte-identical");
  return out;
#endif
}

struct Criterion {
  int id;
  const char* label;
  Outcome (*run)();
};

const Criterion kCriteria[] = {
    {1, "hard-instance cut identities", criterion_identities},
    {2, "chi^2 chain: brute force, pair moments, analytic ceiling", criterion_chi2_chain},
    {3, "metric inequalities and hypergeometric tails", criterion_metric_inequalities},
    {4, "packing closed forms and CP certificates", criterion_packing},
    {5, "spectral instance identities", criterion_quantum_identities},
    {6, "witness soundness, 1000 pairs", criterion_witness_soundness},
    {7, "concentration bound domination", criterion_concentration},
    {8, "farness certification regression", criterion_farness_regression},
    {9, "learning-hardness knee scaling", criterion_learning_scaling},
    {10, "CLI byte-reproducibility", criterion_determinism},
};

}  // namespace

int main(int argc, char** argv) {
  int selected = 0;  // 0 = all
  if (argc > 1 && std::strcmp(argv[1], "all") != 0) selected = std::atoi(argv[1]);

  bool all_pass = true;
  for (const Criterion& c : kCriteria) {
    if (selected != 0 && c.id != selected) continue;
    const auto started = std::chrono::steady_clock::now();
    const Outcome outcome = c.run();
    const double secs = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - started)
                            .count();
    std::printf("criterion %2d: %s - %s (%s) [%.2fs]\n", c.id,
                outcome.pass ? "PASS" : "FAIL", c.label, outcome.detail.c_str(), secs);
    std::fflush(stdout);
    if (!outcome.pass) all_pass = false;
  }
  return all_pass ? 0 : 1;
}
