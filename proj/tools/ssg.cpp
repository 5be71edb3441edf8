// Copyright 2026 The SSG Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// ssg: dataset generation, training, sampling, evaluation and export.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "ssg/config.hpp"
#include "ssg/dataset.hpp"
#include "ssg/diffusion.hpp"
#include "ssg/error.hpp"
#include "ssg/io.hpp"
#include "ssg/metrics.hpp"
#include "ssg/spectrum.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ssg;

namespace {

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> profile;
  std::optional<int> threads;
  std::string out;
  std::string data;
  std::string model;
  std::string input;
  std::optional<std::size_t> index;
  std::string which = "ambiguous";
  bool dump_steps = false;
  bool reference_only = false;
};

RunConfig resolve(const Options& o) {
  const RunConfig c = load_config(o.config, {o.profile, o.seed, o.threads});
  std::cout << "config = " << to_json(c).dump() << "\n";
  std::cout << "seed = " << c.seed << "\n";
  return c;
}

std::string pick(const std::string& flag, const std::string& fallback) { return flag.empty() ? fallback : flag; }

void require_exists(const fs::path& p) {
  if (!fs::exists(p)) fail(ErrorCode::io, "no such file or directory", p.string());
}

// Output directories are created on demand; the files inside are written atomically.
fs::path prepare_dir(const fs::path& dir) {
  fs::create_directories(dir);
  return dir;
}

void check_model_grid(const DenoiserModel& model, const SpectrumGrid& grid, const std::string& path) {
  if (!(model.grid == grid)) fail(ErrorCode::shape_mismatch, "model grid differs from the data grid", path);
}

int cmd_gen(const Options& o) {
  const RunConfig c = resolve(o);
  const fs::path out = prepare_dir(pick(o.out, c.paths.data_dir));
  const auto m = build_dataset(c.dataset, out, c.threads);
  std::cout << "wrote " << m.count_train << " train and " << m.count_test << " test pairs to " << out.string()
            << " (train crc " << io::hex32(m.train.crc32) << ", test crc " << io::hex32(m.test.crc32) << ")\n";
  return 0;
}

int cmd_train(const Options& o) {
  const RunConfig c = resolve(o);
  const fs::path data = pick(o.data, c.paths.data_dir);
  require_exists(data);
  const Dataset ds = load_dataset(data);
  const fs::path model_path = pick(o.out, c.paths.model);
  if (model_path.has_parent_path()) prepare_dir(model_path.parent_path());

  const auto result = train(ds.train, ds.test, c.diffusion, [](const EpochRecord& e) {
    std::printf("epoch %d train_loss %.6f test_reward %.4f (%.1f s)\n", e.epoch, e.train_loss, e.test_reward,
                e.seconds);
    std::fflush(stdout);
  });
  save_model(result.model, model_path);
  fs::path report = model_path;
  report.replace_extension(".report.csv");
  io::write_file_atomic(report, report_csv(result.report));
  std::cout << "wrote " << model_path.string() << " and " << report.string() << " after "
            << result.report.wall_seconds << " s\n";
  return 0;
}

int cmd_infer(const Options& o) {
  const RunConfig c = resolve(o);
  const std::string model_path = pick(o.model, c.paths.model);
  require_exists(model_path);
  const DenoiserModel model = load_model(model_path);

  SpectrumMatrix condition;
  std::optional<SpectrumMatrix> expert;
  std::size_t index = 0;
  if (!o.input.empty()) {
    require_exists(o.input);
    condition = read_csv(o.input);
  } else {
    const fs::path data = pick(o.data, c.paths.data_dir);
    require_exists(data);
    const Dataset ds = load_dataset(data);
    index = o.index.value_or(0);
    if (index >= ds.test.size())
      fail(ErrorCode::invalid_argument, "test index " + std::to_string(index) + " out of range", data.string());
    condition = ds.test[index].pair.ambiguous;
    expert = ds.test[index].pair.clear;
  }
  check_model_grid(model, condition.grid, model_path);

  const fs::path out = prepare_dir(pick(o.out, c.paths.report_dir));
  std::vector<SpectrumMatrix> trajectory;
  const auto generated = sample(model, condition, sample_seed(c.seed, index), o.dump_steps ? &trajectory : nullptr);
  write_csv(generated, out / "generated.csv");
  write_pgm(generated, out / "generated.pgm");
  write_pgm(condition, out / "condition.pgm");
  if (expert) {
    write_pgm(*expert, out / "expert.pgm");
    std::printf("reward = %.6f\n", reward(generated, *expert));
  }
  if (o.dump_steps) {
    // trajectory runs x_T .. x_0; files are named by t.
    const int steps = model.schedule.steps;
    for (int i = 0; i <= steps; ++i) {
      char name[32];
      std::snprintf(name, sizeof(name), "step_%02d.pgm", steps - i);
      write_pgm(trajectory.at(static_cast<std::size_t>(i)), out / name);
    }
    std::cout << "wrote " << steps + 1 << " step images\n";
  }
  std::cout << "wrote " << (out / "generated.csv").string() << "\n";
  return 0;
}

int cmd_eval(const Options& o) {
  const RunConfig c = resolve(o);
  const fs::path data = pick(o.data, c.paths.data_dir);
  require_exists(data);
  const Dataset ds = load_dataset(data);

  SpectrumGenerator generator;
  std::optional<DenoiserModel> model;
  if (!o.reference_only) {
    const std::string model_path = pick(o.model, c.paths.model);
    require_exists(model_path);
    model = load_model(model_path);
    check_model_grid(*model, ds.manifest.spec.grid, model_path);
    const std::uint64_t seed = c.seed;
    generator = [&model, seed](const SpectrumPair& pair, std::size_t i) {
      return sample(*model, pair.ambiguous, sample_seed(seed, i));
    };
  }
  const EvalReport report = evaluate(ds.test, generator, static_cast<std::size_t>(c.dataset.sources), c.threads);
  const fs::path out = prepare_dir(pick(o.out, c.paths.report_dir));
  const std::string text = format_report(report);
  io::write_file_atomic(out / "eval_report.txt", text);
  io::write_file_atomic(out / "eval_samples.csv", format_report_csv(report));
  std::cout << text;
  return 0;
}

int cmd_plot(const Options& o) {
  const RunConfig c = resolve(o);
  SpectrumMatrix spec;
  if (!o.input.empty()) {
    require_exists(o.input);
    spec = read_csv(o.input);
  } else {
    const fs::path data = pick(o.data, c.paths.data_dir);
    require_exists(data);
    const Dataset ds = load_dataset(data);
    const std::size_t index = o.index.value_or(0);
    if (index >= ds.test.size())
      fail(ErrorCode::invalid_argument, "test index " + std::to_string(index) + " out of range", data.string());
    if (o.which == "ambiguous") spec = ds.test[index].pair.ambiguous;
    else if (o.which == "clear") spec = ds.test[index].pair.clear;
    else fail(ErrorCode::invalid_argument, "--which must be ambiguous or clear");
  }
  if (o.out.empty()) fail(ErrorCode::invalid_argument, "plot needs --out <file.pgm|file.csv>");
  const fs::path out = o.out;
  if (out.has_parent_path()) prepare_dir(out.parent_path());
  if (out.extension() == ".pgm") write_pgm(spec, out);
  else if (out.extension() == ".csv") write_csv(spec, out);
  else fail(ErrorCode::invalid_argument, "output extension must be .pgm or .csv", out.string());
  std::cout << "wrote " << out.string() << "\n";
  return 0;
}

void report_error(const char* code, const std::string& path, const std::string& message) {
  std::cerr << json{{"error", {{"code", code}, {"path", path}, {"message", message}}}}.dump() << std::endl;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Near-field spectrum generation, SSG training and evaluation"};
  app.require_subcommand(1);
  Options o;

  auto common = [&o](CLI::App* cmd) {
    cmd->add_option("--config", o.config, "JSON run configuration");
    cmd->add_option("--seed", o.seed, "Master seed (overrides the configuration)");
    cmd->add_option("--profile", o.profile, "Preset: desk or full")->check(CLI::IsMember({"desk", "full"}));
    cmd->add_option("--threads", o.threads, "Worker threads; 1 is the deterministic path")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--out", o.out, "Output file or directory");
  };

  auto* gen = app.add_subcommand("gen", "Build the paired-spectrum dataset");
  common(gen);

  auto* tr = app.add_subcommand("train", "Train the spectrum generator");
  common(tr);
  tr->add_option("--data", o.data, "Dataset directory");

  auto* inf = app.add_subcommand("infer", "Sample a clear spectrum from an ambiguous one");
  common(inf);
  inf->add_option("--model", o.model, "Model file");
  inf->add_option("--input", o.input, "Condition spectrum (CSV)");
  inf->add_option("--data", o.data, "Dataset directory (used when --input is absent)");
  inf->add_option("--index", o.index, "Test pair index");
  inf->add_flag("--dump-steps", o.dump_steps, "Write every intermediate x_t as a graymap");

  auto* ev = app.add_subcommand("eval", "Localization and DoA metrics on the test split");
  common(ev);
  ev->add_option("--model", o.model, "Model file");
  ev->add_option("--data", o.data, "Dataset directory");
  ev->add_flag("--reference-only", o.reference_only, "Skip the generator arm");

  auto* pl = app.add_subcommand("plot", "Export a spectrum as P5 graymap or CSV");
  common(pl);
  pl->add_option("--input", o.input, "Spectrum CSV");
  pl->add_option("--data", o.data, "Dataset directory (used when --input is absent)");
  pl->add_option("--index", o.index, "Test pair index");
  pl->add_option("--which", o.which, "ambiguous or clear")->check(CLI::IsMember({"ambiguous", "clear"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    report_error("config", "", e.what());
    return 2;
  }

  try {
    if (*gen) return cmd_gen(o);
    if (*tr) return cmd_train(o);
    if (*inf) return cmd_infer(o);
    if (*ev) return cmd_eval(o);
    if (*pl) return cmd_plot(o);
  } catch (const Error& e) {
    report_error(to_string(e.code()), e.path(), e.what());
    return 1;
  } catch (const fs::filesystem_error& e) {
    report_error("io", e.path1().string(), e.what());
    return 1;
  } catch (const std::exception& e) {
    report_error("internal", "", e.what());
    return 1;
  }
  return 0;
}
