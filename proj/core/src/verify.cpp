// core/src/verify.cpp

// Copyright 2026  The octl authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "octl/verify.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "octl/error.hpp"
#include "octl/eval.hpp"
#include "octl/gradients.hpp"
#include "octl/lattice.hpp"
#include "octl/logmath.hpp"
#include "octl/regularizers.hpp"
#include "octl/rescale.hpp"
#include "octl/rng.hpp"

namespace octl {

namespace {

TokenInventory MakeInventory(int num_units) {
  // blank last, ids 0..num_units-2 are labels named u0, u1, ...
  std::vector<std::string> names;
  for (int i = 0; i + 1 < num_units; ++i) {
    names.push_back("u" + std::to_string(i));
  }
  names.push_back("<blank>");
  return TokenInventory(names, num_units - 1);
}

FramePosteriors RandomPosteriors(int n, int t, Rng& rng) {
  Mat m(n, t);
  for (int j = 0; j < t; ++j) {
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      m(i, j) = std::exp(rng.Uniform(-2.0, 2.0));
      sum += m(i, j);
    }
    for (int i = 0; i < n; ++i) m(i, j) /= sum;
  }
  return FramePosteriors::Checked(std::move(m));
}

Mat RandomLogits(int n, int t, Rng& rng) {
  Mat m(n, t);
  for (std::size_t i = 0; i < m.data.size(); ++i) {
    m.data[i] = rng.Uniform(-2.0, 2.0);
  }
  return m;
}

// Random feasible instance: target of u labels whose extended form fits
// in t frames (redrawn otherwise).
struct Instance {
  TokenInventory inv;
  ExtendedLabels ext;
  int frames = 0;
};

Instance RandomInstance(int max_units, int max_frames, int max_labels,
                        Rng& rng) {
  for (;;) {
    const int n = 2 + static_cast<int>(rng.UniformInt(max_units - 1));
    const int t = 1 + static_cast<int>(rng.UniformInt(max_frames));
    const int u = 1 + static_cast<int>(rng.UniformInt(max_labels));
    TokenInventory inv = MakeInventory(n);
    std::vector<int> y(u);
    for (int i = 0; i < u; ++i) {
      y[i] = static_cast<int>(rng.UniformInt(n - 1));
    }
    ExtendedLabels ext = ExtendLabels(y, inv);
    if (ext.min_frames() <= t) {
      return Instance{std::move(inv), std::move(ext), t};
    }
  }
}

double RelErr(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

std::string Sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2e", v);
  return buf;
}

}  // namespace

std::vector<CheckResult> OracleSuite(std::uint64_t seed) {
  std::vector<CheckResult> out;

  {
    CheckResult c{"frozen worked examples", true, 0, 0.0, ""};
    auto expect = [&](bool ok, const std::string& what) {
      ++c.checked;
      if (!ok && c.passed) {
        c.passed = false;
        c.detail = what;
      }
    };

    TokenInventory ab({"a", "b", "<blank>"}, 2);
    {
      Mat m(3, 1);
      m(0, 0) = 0.6;
      m(1, 0) = 0.0;
      m(2, 0) = 0.4;
      const auto post = FramePosteriors::Checked(std::move(m));
      const auto ext = ExtendLabels(std::vector<int>{0}, ab);
      expect(RelErr(CtcLoss(ext, post), -std::log(0.6)) < 1e-12,
             "single-frame loss differs from -ln 0.6");
    }
    {
      const auto post = FramePosteriors::Checked(Mat(3, 3, 1.0 / 3.0));
      const auto ext = ExtendLabels(std::vector<int>{0, 1}, ab);
      expect(RelErr(CtcLoss(ext, post), -std::log(5.0 / 27.0)) < 1e-12,
             "two-label uniform loss differs from -ln(5/27)");
    }
    {
      const auto post = FramePosteriors::Checked(Mat(3, 2, 1.0 / 3.0));
      const auto ext = ExtendLabels(std::vector<int>{0}, ab);
      expect(RelErr(CtcLoss(ext, post), std::log(3.0)) < 1e-12,
             "single-label two-frame loss differs from ln 3");
    }
    {
      TokenInventory inv({"o", "<blank>"}, 1);
      const auto ext = ExtendLabels(std::vector<int>{0, 0}, inv);
      expect(ext.min_frames() == 3, "repeated label needs three frames");
    }
    {
      TokenInventory inv({"<blank>", "bre_", "xi_", "t"}, 0);
      const auto ext =
          ExtendLabels(std::vector<std::string>{"bre_", "xi_", "t"}, inv);
      expect(ext.units == std::vector<int>{0, 1, 0, 2, 0, 3, 0},
             "extended layout for a three-piece word is wrong");
    }
    out.push_back(std::move(c));
  }

  CheckResult oracle{"oracle equivalence", true, 0, 0.0, ""};
  CheckResult conserve{"occupancy conservation", true, 0, 0.0, ""};
  CheckResult reach{"reachability masks", true, 0, 0.0, ""};
  Rng rng(DeriveSeed(seed, 1));
  for (int it = 0; it < 200; ++it) {
    const Instance ins = RandomInstance(3, 8, 3, rng);
    const auto post =
        RandomPosteriors(ins.inv.size(), ins.frames, rng);
    const double loss = CtcLoss(ins.ext, post);
    const double brute = BruteForceLoss(ins.ext, post);
    const double err = std::abs(loss - brute) / (1.0 + std::abs(loss));
    ++oracle.checked;
    oracle.worst = std::max(oracle.worst, err);
    if (err > 1e-9 && oracle.passed) {
      oracle.passed = false;
      oracle.detail = "instance " + std::to_string(it) + " err " + Sci(err);
    }

    const Lattice lat = Lattice::Compute(ins.ext, post);
    const Mat occ = NodeOccupancy(lat);
    const double total = std::exp(lat.log_total);
    for (std::size_t t = 0; t < occ.cols; ++t) {
      double sum = 0.0;
      for (std::size_t s = 0; s < occ.rows; ++s) sum += occ(s, t);
      const double cerr = std::abs(sum - total) / total;
      ++conserve.checked;
      conserve.worst = std::max(conserve.worst, cerr);
      if (cerr > 1e-9 && conserve.passed) {
        conserve.passed = false;
        conserve.detail =
            "instance " + std::to_string(it) + " frame " + std::to_string(t);
      }
    }

    const auto fwd = ForwardReachable(ins.ext, ins.frames);
    const auto bwd = BackwardReachable(ins.ext, ins.frames);
    bool mask_ok = true;
    for (std::size_t s = 0; s < lat.log_alpha.rows; ++s) {
      for (std::size_t t = 0; t < lat.log_alpha.cols; ++t) {
        mask_ok &= (lat.log_alpha(s, t) > kLogZero) == (fwd(s, t) != 0);
        mask_ok &= (lat.log_beta(s, t) > kLogZero) == (bwd(s, t) != 0);
      }
    }
    ++reach.checked;
    if (!mask_ok && reach.passed) {
      reach.passed = false;
      reach.detail = "instance " + std::to_string(it);
    }
  }
  out.push_back(std::move(oracle));
  out.push_back(std::move(conserve));
  out.push_back(std::move(reach));
  return out;
}

std::vector<CheckResult> GradcheckSuite(std::uint64_t seed) {
  std::vector<CheckResult> out;
  Rng rng(DeriveSeed(seed, 2));

  {
    CheckResult c{"finite difference gradients", true, 0, 0.0, ""};
    for (int it = 0; it < 50; ++it) {
      const Instance ins = RandomInstance(4, 6, 3, rng);
      const Mat logits = RandomLogits(ins.inv.size(), ins.frames, rng);
      const FdReport rep = FiniteDiffCheck(ins.ext, logits);
      ++c.checked;
      c.worst = std::max(c.worst, rep.max_rel_err);
      if (rep.max_rel_err > 1e-5 && c.passed) {
        c.passed = false;
        c.detail =
            "instance " + std::to_string(it) + " err " + Sci(rep.max_rel_err);
      }
    }
    out.push_back(std::move(c));
  }

  {
    CheckResult c{"unit rescale identity", true, 0, 0.0, ""};
    for (int it = 0; it < 25; ++it) {
      Instance ins = RandomInstance(4, 6, 3, rng);
      const Mat logits = RandomLogits(ins.inv.size(), ins.frames, rng);
      for (std::size_t p = 0; p < ins.ext.oov_mark.size(); ++p) {
        ins.ext.oov_mark[p] = rng.UniformInt(2) == 1;
      }
      RescaleConfig cfg;
      cfg.mu = 1.0;
      cfg.level = RescaleLevel::kWord;
      const LossGradient plain = LogitsGradient(ins.ext, logits);
      const LossGradient scaled = LogitsGradient(ins.ext, logits, &cfg, true);
      ++c.checked;
      double err = RelErr(plain.loss, scaled.loss);
      for (std::size_t i = 0; i < plain.d_logits.data.size(); ++i) {
        err = std::max(
            err, RelErr(plain.d_logits.data[i], scaled.d_logits.data[i]));
      }
      c.worst = std::max(c.worst, err);
      if (err > 1e-12 && c.passed) {
        c.passed = false;
        c.detail = "instance " + std::to_string(it) + " err " + Sci(err);
      }
    }
    out.push_back(std::move(c));
  }

  {
    CheckResult c{"all marked nodes scale the gradient", true, 0, 0.0, ""};
    for (int it = 0; it < 25; ++it) {
      Instance ins = RandomInstance(4, 6, 3, rng);
      const auto post =
          RandomPosteriors(ins.inv.size(), ins.frames, rng);
      const double mu = (it % 2 == 0) ? 10.0 : 100.0;
      for (std::size_t p = 0; p < ins.ext.oov_mark.size(); ++p) {
        ins.ext.oov_mark[p] = true;
      }
      RescaleConfig cfg;
      cfg.mu = mu;
      cfg.level = RescaleLevel::kWord;
      const LossGradient plain = PosteriorGradient(ins.ext, post);
      const Lattice lat = Lattice::Compute(ins.ext, post);
      const Mat scaled = WordRescaledGradient(lat, ins.ext, post, cfg);
      ++c.checked;
      double err = 0.0;
      for (std::size_t i = 0; i < scaled.data.size(); ++i) {
        err = std::max(err,
                       RelErr(mu * plain.d_posteriors.data[i], scaled.data[i]));
      }
      c.worst = std::max(c.worst, err);
      if (err > 1e-12 && c.passed) {
        c.passed = false;
        c.detail = "instance " + std::to_string(it) + " err " + Sci(err);
      }
    }
    out.push_back(std::move(c));
  }

  {
    CheckResult c{"single marked node locality", true, 0, 0.0, ""};
    for (int it = 0; it < 25; ++it) {
      Instance ins = RandomInstance(4, 6, 3, rng);
      const auto post =
          RandomPosteriors(ins.inv.size(), ins.frames, rng);
      const std::size_t pick = rng.UniformInt(ins.ext.oov_mark.size());
      for (std::size_t p = 0; p < ins.ext.oov_mark.size(); ++p) {
        ins.ext.oov_mark[p] = p == pick;
      }
      RescaleConfig cfg;
      cfg.mu = 100.0;
      cfg.level = RescaleLevel::kWord;
      const LossGradient plain = PosteriorGradient(ins.ext, post);
      const Lattice lat = Lattice::Compute(ins.ext, post);
      const Mat scaled = WordRescaledGradient(lat, ins.ext, post, cfg);
      const int unit = ins.ext.units[pick];
      ++c.checked;
      bool ok = true;
      for (std::size_t n = 0; n < scaled.rows; ++n) {
        if (static_cast<int>(n) == unit) continue;
        for (std::size_t t = 0; t < scaled.cols; ++t) {
          ok &= scaled(n, t) == plain.d_posteriors(n, t);
        }
      }
      if (!ok && c.passed) {
        c.passed = false;
        c.detail = "instance " + std::to_string(it);
      }
    }
    out.push_back(std::move(c));
  }

  {
    CheckResult c{"sentence rescale scales loss and gradient", true, 0, 0.0,
                  ""};
    for (int it = 0; it < 25; ++it) {
      const Instance ins = RandomInstance(4, 6, 3, rng);
      const Mat logits = RandomLogits(ins.inv.size(), ins.frames, rng);
      RescaleConfig cfg;
      cfg.mu = 100.0;
      cfg.level = RescaleLevel::kSentence;
      const LossGradient plain = LogitsGradient(ins.ext, logits);
      const LossGradient scaled = LogitsGradient(ins.ext, logits, &cfg, true);
      const LossGradient untouched =
          LogitsGradient(ins.ext, logits, &cfg, false);
      ++c.checked;
      double err = RelErr(scaled.loss, 100.0 * plain.loss);
      err = std::max(err, RelErr(untouched.loss, plain.loss));
      for (std::size_t i = 0; i < plain.d_logits.data.size(); ++i) {
        err = std::max(err, RelErr(100.0 * plain.d_logits.data[i],
                                   scaled.d_logits.data[i]));
      }
      c.worst = std::max(c.worst, err);
      if (err > 1e-12 && c.passed) {
        c.passed = false;
        c.detail = "instance " + std::to_string(it) + " err " + Sci(err);
      }
    }
    out.push_back(std::move(c));
  }

  return out;
}

std::vector<CheckResult> RegcheckSuite(std::uint64_t seed) {
  std::vector<CheckResult> out;
  Rng rng(DeriveSeed(seed, 3));
  const std::size_t dim = 12;

  const std::vector<std::pair<std::string, std::size_t>> layout = {
      {"w", dim}};

  auto random_params = [&](double scale) {
    ParamVector p(layout);
    for (double& v : p.values) v = rng.Uniform(-scale, scale);
    return p;
  };

  {
    CheckResult c{"penalty finite differences", true, 0, 0.0, ""};
    for (int it = 0; it < 20; ++it) {
      ParamVector theta = random_params(1.0);
      const ParamVector anchor = random_params(1.0);
      const double lambda = (it % 2 == 0) ? 1e7 : 5e7;
      FisherSnapshot snap;
      snap.anchor = anchor;
      snap.fisher.resize(dim);
      for (double& f : snap.fisher) f = rng.Uniform(0.0, 2.0);
      const bool use_ewc = it % 3 == 0;
      const Penalty pen = use_ewc ? EwcPenalty(theta, snap, lambda)
                                  : L2Penalty(theta, anchor, lambda);
      // Central differences have zero truncation error on a quadratic, so
      // the step only has to beat cancellation at these lambda scales.
      const double h = 1e-4;
      double err = 0.0;
      for (std::size_t k = 0; k < dim; ++k) {
        const double saved = theta.values[k];
        theta.values[k] = saved + h;
        const double up = use_ewc ? EwcPenalty(theta, snap, lambda).value
                                  : L2Penalty(theta, anchor, lambda).value;
        theta.values[k] = saved - h;
        const double dn = use_ewc ? EwcPenalty(theta, snap, lambda).value
                                  : L2Penalty(theta, anchor, lambda).value;
        theta.values[k] = saved;
        const double fd = (up - dn) / (2.0 * h);
        err = std::max(err, std::abs(fd - pen.gradient[k]) /
                                std::max({1.0, std::abs(fd),
                                          std::abs(pen.gradient[k])}));
      }
      ++c.checked;
      c.worst = std::max(c.worst, err);
      if (err > 1e-8 && c.passed) {
        c.passed = false;
        c.detail = "instance " + std::to_string(it) + " err " + Sci(err);
      }
    }
    out.push_back(std::move(c));
  }

  {
    CheckResult c{"unit fisher reduces ewc to l2", true, 0, 0.0, ""};
    for (int it = 0; it < 10; ++it) {
      const ParamVector theta = random_params(1.0);
      FisherSnapshot snap;
      snap.anchor = random_params(1.0);
      snap.fisher.assign(dim, 1.0);
      const double lambda = 3.5;
      const Penalty l2 = L2Penalty(theta, snap.anchor, lambda);
      const Penalty ewc = EwcPenalty(theta, snap, lambda);
      double err = RelErr(l2.value, ewc.value);
      for (std::size_t k = 0; k < dim; ++k) {
        err = std::max(err, RelErr(l2.gradient[k], ewc.gradient[k]));
      }
      ++c.checked;
      c.worst = std::max(c.worst, err);
      if (err > 1e-12 && c.passed) {
        c.passed = false;
        c.detail = "instance " + std::to_string(it) + " err " + Sci(err);
      }
    }
    out.push_back(std::move(c));
  }

  {
    CheckResult c{"quadratic loss fisher analytic", true, 0, 0.0, ""};
    for (int it = 0; it < 10; ++it) {
      const ParamVector anchor = random_params(1.0);
      const std::size_t count = 7 + rng.UniformInt(10);
      std::vector<std::vector<double>> data(count);
      for (auto& x : data) {
        x.resize(dim);
        for (double& v : x) v = rng.Uniform(-1.0, 1.0);
      }
      // Per-example loss 0.5*||theta - x_i||^2 has gradient theta - x_i
      // at the anchor, so the Fisher diagonal is the mean square of it.
      const FisherSnapshot snap = EstimateFisher(
          anchor,
          [&](std::size_t i) {
            std::vector<double> g(dim);
            for (std::size_t k = 0; k < dim; ++k) {
              g[k] = anchor.values[k] - data[i][k];
            }
            return g;
          },
          count);
      double err = 0.0;
      for (std::size_t k = 0; k < dim; ++k) {
        double mean_sq = 0.0;
        for (std::size_t i = 0; i < count; ++i) {
          const double g = anchor.values[k] - data[i][k];
          mean_sq += g * g;
        }
        mean_sq /= static_cast<double>(count);
        err = std::max(err, RelErr(mean_sq, snap.fisher[k]));
      }
      ++c.checked;
      c.worst = std::max(c.worst, err);
      if (err > 1e-12 && c.passed) {
        c.passed = false;
        c.detail = "instance " + std::to_string(it) + " err " + Sci(err);
      }
    }
    out.push_back(std::move(c));
  }

  {
    CheckResult c{"penalty vanishes at the anchor", true, 0, 0.0, ""};
    const ParamVector anchor = random_params(1.0);
    const Penalty pen = L2Penalty(anchor, anchor, 5e7);
    bool ok = pen.value == 0.0;
    for (const double g : pen.gradient) ok &= g == 0.0;
    c.checked = 1;
    if (!ok) {
      c.passed = false;
      c.detail = "nonzero penalty at theta = anchor";
    }
    out.push_back(std::move(c));
  }

  {
    CheckResult c{"negative fisher entries rejected", true, 1, 0.0, ""};
    FisherSnapshot snap;
    snap.anchor = random_params(1.0);
    snap.fisher.assign(dim, 1.0);
    snap.fisher[3] = -1e-9;
    bool threw = false;
    try {
      ValidateSnapshot(snap);
    } catch (const Error& e) {
      threw = e.code() == ErrorCode::kCorruptSnapshot;
    }
    if (!threw) {
      c.passed = false;
      c.detail = "negative entry passed validation";
    }
    out.push_back(std::move(c));
  }

  return out;
}

std::vector<CheckResult> MetricsSuite(std::uint64_t seed) {
  std::vector<CheckResult> out;

  {
    CheckResult c{"frozen edit distance examples", true, 0, 0.0, ""};
    auto expect = [&](bool ok, const std::string& what) {
      ++c.checked;
      if (!ok && c.passed) {
        c.passed = false;
        c.detail = what;
      }
    };
    using V = std::vector<std::string>;
    {
      const auto r = WordErrorRate(V{"news", "about", "brexit"},
                                   V{"news", "about", "brexit"});
      expect(r.wer == 0.0 && r.substitutions + r.deletions + r.insertions == 0,
             "identity transcript not at zero");
    }
    {
      const auto r =
          WordErrorRate(V{"news", "about", "brexit"}, V{"news", "brexit"});
      expect(r.deletions == 1 && RelErr(r.wer, 100.0 / 3.0) < 1e-12,
             "single deletion example");
    }
    {
      const auto r = WordErrorRate(V{"a"}, V{"b", "c"});
      expect(RelErr(r.wer, 200.0) < 1e-12, "two-edit single-word example");
    }
    {
      const auto r = WordErrorRate(V{"a", "b"}, V{"b", "a"});
      expect(r.substitutions == 2 && r.deletions == 0 && r.insertions == 0,
             "substitution preference on ties");
    }
    {
      bool threw = false;
      try {
        WordErrorRate(V{}, V{"a"});
      } catch (const Error& e) {
        threw = e.code() == ErrorCode::kEmptyReference;
      }
      expect(threw, "empty reference accepted");
    }
    out.push_back(std::move(c));
  }

  {
    CheckResult c{"frozen oov count examples", true, 0, 0.0, ""};
    auto expect = [&](bool ok, const std::string& what) {
      ++c.checked;
      if (!ok && c.passed) {
        c.passed = false;
        c.detail = what;
      }
    };
    using V = std::vector<std::string>;
    const std::unordered_set<std::string> oov = {"brexit"};
    {
      const auto co = CountOov(V{"brexit"}, V{"brexit", "brexit"}, oov);
      expect(co.tp == 1 && co.fp == 1 && co.fn == 0,
             "double prediction counts");
      expect(PrecisionPercent(co.tp, co.fp) == 50.0, "precision 50");
    }
    {
      const auto co = CountOov(V{"brexit", "brexit"}, V{"news"}, oov);
      expect(co.tp == 0 && co.fn == 2, "missed occurrences");
    }
    expect(RecallPercent(0, 0) == 100.0, "empty-denominator recall");
    expect(PrecisionPercent(0, 0) == 100.0, "empty-denominator precision");
    out.push_back(std::move(c));
  }

  {
    CheckResult c{"oov identity over random pairs", true, 0, 0.0, ""};
    Rng rng(DeriveSeed(seed, 4));
    const std::vector<std::string> pool = {"aa", "bb", "cc", "dd", "ee"};
    const std::unordered_set<std::string> oov = {"aa", "cc", "ee"};
    for (int it = 0; it < 100; ++it) {
      std::vector<std::string> ref;
      std::vector<std::string> hyp;
      const std::size_t nr = 1 + rng.UniformInt(6);
      const std::size_t nh = rng.UniformInt(7);
      for (std::size_t i = 0; i < nr; ++i) {
        ref.push_back(pool[rng.UniformInt(pool.size())]);
      }
      for (std::size_t i = 0; i < nh; ++i) {
        hyp.push_back(pool[rng.UniformInt(pool.size())]);
      }
      const auto rep = EvaluateHypotheses({ref}, {hyp}, oov);
      std::size_t ref_oov = 0;
      for (const auto& w : ref) ref_oov += oov.count(w);
      const bool ok = rep.tp + rep.fn == ref_oov && rep.recall >= 0.0 &&
                      rep.recall <= 100.0 && rep.precision >= 0.0 &&
                      rep.precision <= 100.0;
      ++c.checked;
      if (!ok && c.passed) {
        c.passed = false;
        c.detail = "pair " + std::to_string(it);
      }
    }
    out.push_back(std::move(c));
  }

  return out;
}

bool AllPassed(const std::vector<CheckResult>& checks) {
  for (const auto& c : checks) {
    if (!c.passed) return false;
  }
  return true;
}

std::string FormatChecks(const std::vector<CheckResult>& checks) {
  std::ostringstream os;
  for (const auto& c : checks) {
    if (c.passed) {
      os << "ok   " << c.name << " (n=" << c.checked;
      if (c.worst > 0.0) os << ", worst " << Sci(c.worst);
      os << ")\n";
    } else {
      os << "FAIL " << c.name << ": " << c.detail << "\n";
    }
  }
  return os.str();
}

}  // namespace octl
