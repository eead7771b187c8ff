// tools/octl.cpp

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

// Experiment driver: corpus generation, base training, Fisher estimation,
// fine-tuning (single runs and grid sweeps), evaluation, verification.
// Exit codes: 0 ok, 1 unexpected failure, 2 config, 3 data, 4 checkpoint,
// 5 verification failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "octl/checkpoint.hpp"
#include "octl/config.hpp"
#include "octl/corpus.hpp"
#include "octl/error.hpp"
#include "octl/eval.hpp"
#include "octl/model.hpp"
#include "octl/trainer.hpp"
#include "octl/verify.hpp"

namespace fs = std::filesystem;
using namespace octl;

namespace {

int CodeFor(ErrorCode c) {
  switch (c) {
    case ErrorCode::kConfigError:
      return 2;
    case ErrorCode::kCorruptDataset:
    case ErrorCode::kEmptyDataset:
    case ErrorCode::kUncoverableWord:
    case ErrorCode::kInvalidInventory:
    case ErrorCode::kIoError:
      return 3;
    case ErrorCode::kCorruptCheckpoint:
    case ErrorCode::kCorruptSnapshot:
    case ErrorCode::kLayoutMismatch:
    case ErrorCode::kShapeMismatch:
      return 4;
    case ErrorCode::kVerificationFailure:
      return 5;
    default:
      return 1;
  }
}

int Guard(const std::function<void()>& body) {
  try {
    body();
    return 0;
  } catch (const Error& e) {
    std::cerr << "octl: " << e.what() << "\n";
    return CodeFor(e.code());
  } catch (const std::exception& e) {
    std::cerr << "octl: " << e.what() << "\n";
    return 1;
  }
}

struct CommonOpts {
  std::string config_path;
  std::vector<std::string> sets;
};

void AddCommon(CLI::App* sc, CommonOpts& opts) {
  sc->add_option("--config", opts.config_path, "config file (key=value)");
  sc->add_option("--set", opts.sets,
                 "override one config key, e.g. --set rescale.mu=100");
}

ExperimentConfig LoadConfig(const CommonOpts& opts) {
  try {
    ExperimentConfig cfg = opts.config_path.empty()
                               ? ExperimentConfig{}
                               : ParseConfigFile(opts.config_path);
    for (const auto& kv : opts.sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) {
        Throw(ErrorCode::kConfigError, "--set needs key=value, got " + kv);
      }
      ApplyKey(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    FinalizeConfig(cfg);
    return cfg;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kConfigError) throw;
    Throw(ErrorCode::kConfigError, e.what());
  }
}

Checkpoint LoadCheckpoint(const std::string& path) {
  try {
    return ReadCheckpoint(path);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kIoError) {
      Throw(ErrorCode::kCorruptCheckpoint, e.what());
    }
    throw;
  }
}

FisherSnapshot LoadFisher(const std::string& path) {
  try {
    return ReadFisherSnapshot(path);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kIoError) {
      Throw(ErrorCode::kCorruptSnapshot, e.what());
    }
    throw;
  }
}

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) Throw(ErrorCode::kIoError, "cannot write " + path.string());
  out << text;
  if (!out) Throw(ErrorCode::kIoError, "write failed: " + path.string());
}

std::string Pct(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

constexpr const char* kResultsHeader =
    "mu\tlambda\treg\tlevel\tblank_policy\tmix\twer_invocab\twer_oov\t"
    "oov_recall\toov_precision\tsteps\tval_loss\n";

std::string ResultsRow(const ExperimentConfig& cfg, const TrainResult& run,
                       const EvalReport& invocab, const EvalReport& oov) {
  std::ostringstream os;
  const char* reg = cfg.reg == Regularizer::kNone
                        ? "none"
                        : (cfg.reg == Regularizer::kL2 ? "l2" : "ewc");
  const char* level =
      cfg.rescale.level == RescaleLevel::kSentence ? "sentence" : "word";
  const char* policy =
      cfg.rescale.blank_policy == BlankPolicy::kLabelsOnly
          ? "labels_only"
          : (cfg.rescale.blank_policy == BlankPolicy::kLabelsPlusInteriorBlanks
                 ? "labels_plus_interior_blanks"
                 : "labels_interior_and_trailing_blank");
  os << cfg.rescale.mu << "\t"
     << (cfg.reg == Regularizer::kNone ? 0.0 : cfg.lambda) << "\t" << reg
     << "\t" << level << "\t" << policy << "\t" << cfg.train.mix_source << ":"
     << cfg.train.mix_target << "\t" << Pct(invocab.wer) << "\t"
     << Pct(oov.wer) << "\t" << Pct(oov.recall) << "\t" << Pct(oov.precision)
     << "\t" << run.steps_run << "\t" << Pct(run.best.validation_loss)
     << "\n";
  return os.str();
}

std::string TraceTsv(const TrainResult& run) {
  std::ostringstream os;
  os << "step\tval_loss\n";
  for (const auto& p : run.trace) {
    os << p.step << "\t" << Pct(p.loss) << "\n";
  }
  return os.str();
}

ModelConfig ModelFor(const ExperimentConfig& cfg, const Dataset& ds) {
  ModelConfig m = cfg.model;
  m.num_units = static_cast<std::size_t>(ds.lexicon.inventory().size());
  return m;
}

FinetuneOptions OptionsFor(const ExperimentConfig& cfg,
                           const FisherSnapshot* fisher) {
  FinetuneOptions opts;
  opts.rescale = cfg.rescale;
  opts.reg = cfg.reg;
  opts.lambda = cfg.lambda;
  opts.fisher = fisher;
  opts.mask_augment = cfg.mask_augment;
  opts.mask_max_width = cfg.mask_max_width;
  return opts;
}

void EvalAndWrite(const fs::path& dir, const Checkpoint& ckpt,
                  const Dataset& ds, EvalReport* invocab_out,
                  EvalReport* oov_out) {
  const auto oov_words = ds.lexicon.oov_words();
  const EvalReport invocab =
      Evaluate(ckpt.params, ckpt.model, ds.lexicon,
               ds.Select("source", "test"), oov_words);
  const EvalReport oov = Evaluate(ckpt.params, ckpt.model, ds.lexicon,
                                  ds.Select("target", "test"), oov_words);
  WriteText(dir / "report_invocab.txt", FormatReport(invocab));
  WriteText(dir / "report_invocab.tsv", FormatReportTsv(invocab));
  WriteText(dir / "report_oov.txt", FormatReport(oov));
  WriteText(dir / "report_oov.tsv", FormatReportTsv(oov));
  if (invocab_out != nullptr) *invocab_out = invocab;
  if (oov_out != nullptr) *oov_out = oov;
}

int RunGenData(const CommonOpts& common, const std::string& out_dir) {
  return Guard([&] {
    const ExperimentConfig cfg = LoadConfig(common);
    const Lexicon lex =
        Lexicon::Generate(cfg.invocab_words, cfg.oov_words, cfg.corpus.seed);
    const Dataset ds = BuildSplits(lex, cfg.corpus, cfg.sizes);
    fs::create_directories(out_dir);
    WriteDataset(out_dir, ds);
    WriteText(fs::path(out_dir) / "config.txt", FormatConfig(cfg));
    std::cout << "wrote " << ds.records.size() << " utterances, "
              << lex.inventory().size() << " units, "
              << lex.words().size() << " words to " << out_dir << "\n";
  });
}

int RunTrainBase(const CommonOpts& common, const std::string& data_dir,
                 const std::string& out_file) {
  return Guard([&] {
    const ExperimentConfig cfg = LoadConfig(common);
    const Dataset ds = ReadDataset(data_dir);
    const TrainResult run = TrainBase(ds, ModelFor(cfg, ds), cfg.train);
    if (const fs::path dir = fs::path(out_file).parent_path(); !dir.empty()) {
      fs::create_directories(dir);
    }
    WriteCheckpoint(out_file, run.best);
    std::cout << "base checkpoint: step " << run.best.step << ", val loss "
              << run.best.validation_loss << " (" << run.steps_run
              << " steps run) -> " << out_file << "\n";
  });
}

int RunEstimateFisher(const CommonOpts& common, const std::string& data_dir,
                      const std::string& ckpt_file,
                      const std::string& out_file) {
  return Guard([&] {
    LoadConfig(common);  // validates overrides even though none are used
    const Dataset ds = ReadDataset(data_dir);
    const Checkpoint ckpt = LoadCheckpoint(ckpt_file);
    const FisherSnapshot snap = EstimateFisherOnCorpus(
        ckpt.params, ckpt.model, ds.lexicon, ds.Select("source", "train"));
    if (const fs::path dir = fs::path(out_file).parent_path(); !dir.empty()) {
      fs::create_directories(dir);
    }
    WriteFisherSnapshot(out_file, snap, ckpt.model);
    std::cout << "fisher diagonal over " << snap.dataset_size
              << " utterances -> " << out_file << "\n";
  });
}

int RunFinetune(const CommonOpts& common, const std::string& data_dir,
                const std::string& ckpt_file, const std::string& fisher_file,
                const std::string& out_dir) {
  return Guard([&] {
    const ExperimentConfig cfg = LoadConfig(common);
    const Dataset ds = ReadDataset(data_dir);
    const Checkpoint base = LoadCheckpoint(ckpt_file);
    FisherSnapshot fisher;
    const FisherSnapshot* fisher_ptr = nullptr;
    if (!fisher_file.empty()) {
      fisher = LoadFisher(fisher_file);
      fisher_ptr = &fisher;
    }
    const TrainResult run =
        Finetune(base, ds, cfg.train, OptionsFor(cfg, fisher_ptr));
    fs::create_directories(out_dir);
    const fs::path dir(out_dir);
    WriteCheckpoint(dir / "checkpoint.octl", run.best);
    WriteText(dir / "config.txt", FormatConfig(cfg));
    WriteText(dir / "validation_trace.tsv", TraceTsv(run));
    EvalReport invocab;
    EvalReport oov;
    EvalAndWrite(dir, run.best, ds, &invocab, &oov);
    WriteText(dir / "results.tsv",
              std::string(kResultsHeader) + ResultsRow(cfg, run, invocab, oov));
    std::cout << "finetuned: step " << run.best.step << ", val loss "
              << run.best.validation_loss << ", invocab WER "
              << Pct(invocab.wer) << "%, oov recall " << Pct(oov.recall)
              << "% -> " << out_dir << "\n";
  });
}

int RunSweep(const CommonOpts& common, const std::string& data_dir,
             const std::string& ckpt_file, const std::string& fisher_file,
             const std::string& out_dir) {
  return Guard([&] {
    const ExperimentConfig cfg = LoadConfig(common);
    const Dataset ds = ReadDataset(data_dir);
    const Checkpoint base = LoadCheckpoint(ckpt_file);
    FisherSnapshot fisher;
    const FisherSnapshot* fisher_ptr = nullptr;
    if (!fisher_file.empty()) {
      fisher = LoadFisher(fisher_file);
      fisher_ptr = &fisher;
    }
    fs::create_directories(out_dir);
    const std::vector<double> lambdas = cfg.reg == Regularizer::kNone
                                            ? std::vector<double>{cfg.lambda}
                                            : cfg.lambda_grid;
    std::string table = kResultsHeader;
    for (const auto& mix : cfg.mix_grid) {
      for (const double mu : cfg.mu_grid) {
        for (const double lambda : lambdas) {
          ExperimentConfig cell = cfg;
          cell.train.mix_source = mix.first;
          cell.train.mix_target = mix.second;
          cell.rescale.mu = mu;
          cell.lambda = lambda;
          std::ostringstream name;
          name << "mix" << mix.first << "-" << mix.second << "_mu" << mu;
          if (cell.reg != Regularizer::kNone) name << "_lam" << lambda;
          const fs::path cell_dir = fs::path(out_dir) / name.str();
          fs::create_directories(cell_dir);
          const TrainResult run = Finetune(base, ds, cell.train,
                                           OptionsFor(cell, fisher_ptr));
          WriteCheckpoint(cell_dir / "checkpoint.octl", run.best);
          WriteText(cell_dir / "validation_trace.tsv", TraceTsv(run));
          EvalReport invocab;
          EvalReport oov;
          EvalAndWrite(cell_dir, run.best, ds, &invocab, &oov);
          table += ResultsRow(cell, run, invocab, oov);
          std::cout << name.str() << ": invocab WER " << Pct(invocab.wer)
                    << "%, oov recall " << Pct(oov.recall) << "%\n";
        }
      }
    }
    WriteText(fs::path(out_dir) / "results.tsv", table);
    WriteText(fs::path(out_dir) / "config.txt", FormatConfig(cfg));
    std::cout << "sweep table -> " << (fs::path(out_dir) / "results.tsv")
              << "\n";
  });
}

int RunEval(const std::string& ckpt_file, const std::string& data_dir,
            const std::string& domain, const std::string& split,
            const std::string& out_prefix) {
  return Guard([&] {
    const Dataset ds = ReadDataset(data_dir);
    const Checkpoint ckpt = LoadCheckpoint(ckpt_file);
    const auto records = ds.Select(domain, split);
    const EvalReport rep = Evaluate(ckpt.params, ckpt.model, ds.lexicon,
                                    records, ds.lexicon.oov_words());
    std::cout << FormatReport(rep);
    if (!out_prefix.empty()) {
      if (const fs::path dir = fs::path(out_prefix).parent_path();
          !dir.empty()) {
        fs::create_directories(dir);
      }
      WriteText(out_prefix + ".txt", FormatReport(rep));
      WriteText(out_prefix + ".tsv", FormatReportTsv(rep));
    }
  });
}

int RunVerify(const std::string& suite, std::uint64_t seed) {
  return Guard([&] {
    std::vector<CheckResult> checks;
    auto run = [&](const std::string& name,
                   std::vector<CheckResult> (*fn)(std::uint64_t)) {
      if (suite == "all" || suite == name) {
        auto part = fn(seed);
        checks.insert(checks.end(), part.begin(), part.end());
      }
    };
    run("oracle", OracleSuite);
    run("gradcheck", GradcheckSuite);
    run("regcheck", RegcheckSuite);
    run("metrics", MetricsSuite);
    if (checks.empty()) {
      Throw(ErrorCode::kConfigError, "unknown suite '" + suite + "'");
    }
    std::cout << FormatChecks(checks);
    if (!AllPassed(checks)) {
      Throw(ErrorCode::kVerificationFailure, "verification failed");
    }
    std::cout << "all " << checks.size() << " checks passed\n";
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CTC OOV rescaling and continual-learning toolkit"};
  app.require_subcommand(1);
  int rc = 0;

  CommonOpts gen_common;
  std::string gen_out = "data";
  auto* gen = app.add_subcommand("gen-data", "generate the synthetic corpus");
  AddCommon(gen, gen_common);
  gen->add_option("--out", gen_out, "output dataset directory");
  gen->callback([&] { rc = RunGenData(gen_common, gen_out); });

  CommonOpts base_common;
  std::string base_data = "data";
  std::string base_out = "base.octl";
  auto* base = app.add_subcommand("train-base", "train the source model");
  AddCommon(base, base_common);
  base->add_option("--data", base_data, "dataset directory");
  base->add_option("--out", base_out, "checkpoint file to write");
  base->callback([&] { rc = RunTrainBase(base_common, base_data, base_out); });

  CommonOpts fish_common;
  std::string fish_data = "data";
  std::string fish_ckpt = "base.octl";
  std::string fish_out = "fisher.octl";
  auto* fish = app.add_subcommand("estimate-fisher",
                                  "fisher diagonal at a checkpoint");
  AddCommon(fish, fish_common);
  fish->add_option("--data", fish_data, "dataset directory");
  fish->add_option("--checkpoint", fish_ckpt, "source checkpoint");
  fish->add_option("--out", fish_out, "snapshot file to write");
  fish->callback(
      [&] { rc = RunEstimateFisher(fish_common, fish_data, fish_ckpt, fish_out); });

  CommonOpts ft_common;
  std::string ft_data = "data";
  std::string ft_ckpt = "base.octl";
  std::string ft_fisher;
  std::string ft_out = "run";
  std::string ft_mu, ft_level, ft_reg, ft_lambda, ft_mix, ft_policy;
  auto* ft = app.add_subcommand("finetune", "fine-tune on the mixed domains");
  AddCommon(ft, ft_common);
  ft->add_option("--data", ft_data, "dataset directory");
  ft->add_option("--checkpoint", ft_ckpt, "base checkpoint");
  ft->add_option("--fisher", ft_fisher, "fisher snapshot (for --reg ewc)");
  ft->add_option("--out", ft_out, "run directory to write");
  ft->add_option("--mu", ft_mu, "rescale factor");
  ft->add_option("--level", ft_level, "rescale level: sentence|word");
  ft->add_option("--reg", ft_reg, "regularizer: none|l2|ewc");
  ft->add_option("--lambda", ft_lambda, "regularizer weight");
  ft->add_option("--mix-ratio", ft_mix, "source:target per batch, e.g. 2:1");
  ft->add_option("--blank-policy", ft_policy,
                 "labels_only|labels_plus_interior_blanks|"
                 "labels_interior_and_trailing_blank");
  ft->callback([&] {
    CommonOpts opts = ft_common;
    if (!ft_mu.empty()) opts.sets.push_back("rescale.mu=" + ft_mu);
    if (!ft_level.empty()) opts.sets.push_back("rescale.level=" + ft_level);
    if (!ft_reg.empty()) opts.sets.push_back("reg.kind=" + ft_reg);
    if (!ft_lambda.empty()) opts.sets.push_back("reg.lambda=" + ft_lambda);
    if (!ft_mix.empty()) opts.sets.push_back("train.mix_ratio=" + ft_mix);
    if (!ft_policy.empty()) {
      opts.sets.push_back("rescale.blank_policy=" + ft_policy);
    }
    rc = RunFinetune(opts, ft_data, ft_ckpt, ft_fisher, ft_out);
  });

  CommonOpts sweep_common;
  std::string sweep_data = "data";
  std::string sweep_ckpt = "base.octl";
  std::string sweep_fisher;
  std::string sweep_out = "sweep";
  auto* sweep = app.add_subcommand("sweep", "grid of fine-tuning runs");
  AddCommon(sweep, sweep_common);
  sweep->add_option("--data", sweep_data, "dataset directory");
  sweep->add_option("--checkpoint", sweep_ckpt, "base checkpoint");
  sweep->add_option("--fisher", sweep_fisher, "fisher snapshot");
  sweep->add_option("--out", sweep_out, "sweep directory to write");
  sweep->callback([&] {
    rc = RunSweep(sweep_common, sweep_data, sweep_ckpt, sweep_fisher,
                  sweep_out);
  });

  std::string eval_ckpt = "base.octl";
  std::string eval_data = "data";
  std::string eval_domain = "target";
  std::string eval_split = "test";
  std::string eval_prefix;
  auto* ev = app.add_subcommand("eval", "decode and score a split");
  ev->add_option("--checkpoint", eval_ckpt, "checkpoint to evaluate");
  ev->add_option("--data", eval_data, "dataset directory");
  ev->add_option("--domain", eval_domain, "source|target");
  ev->add_option("--split", eval_split, "train|val|test");
  ev->add_option("--out-prefix", eval_prefix,
                 "write PREFIX.txt and PREFIX.tsv");
  ev->callback([&] {
    rc = RunEval(eval_ckpt, eval_data, eval_domain, eval_split, eval_prefix);
  });

  std::string verify_suite = "all";
  std::uint64_t verify_seed = 1;
  auto* ver = app.add_subcommand("verify", "formula verification suites");
  ver->add_option("--suite", verify_suite,
                  "all|oracle|gradcheck|regcheck|metrics");
  ver->add_option("--seed", verify_seed, "suite seed");
  ver->callback([&] { rc = RunVerify(verify_suite, verify_seed); });

  CLI11_PARSE(app, argc, argv);
  return rc;
}
