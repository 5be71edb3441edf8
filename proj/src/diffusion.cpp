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

#include "ssg/diffusion.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numeric>
#include <random>

#include "ssg/error.hpp"
#include "ssg/io.hpp"
#include "ssg/json_util.hpp"
#include "ssg/simulator.hpp"

namespace ssg {

using nlohmann::json;
using nn::Tensor;

NoiseSchedule make_schedule(int steps, double beta_min, double beta_max, const std::string& shape) {
  require(steps >= 1, "schedule needs at least one step");
  require(beta_min > 0.0 && beta_min <= beta_max && beta_max < 1.0,
          "schedule bounds must satisfy 0 < beta_min <= beta_max < 1");
  require(shape == "linear", "only the linear schedule shape is supported");
  NoiseSchedule s;
  s.steps = steps;
  s.beta_min = beta_min;
  s.beta_max = beta_max;
  double running = 1.0;
  for (int t = 1; t <= steps; ++t) {
    const double beta =
        steps == 1 ? beta_min : beta_min + (beta_max - beta_min) * (t - 1) / (steps - 1);
    running *= 1.0 - beta;
    s.beta.push_back(beta);
    s.alpha.push_back(1.0 - beta);
    s.alpha_bar.push_back(running);
  }
  return s;
}

template <typename T>
Tensor<T> q_sample_abar(const Tensor<T>& x0, double alpha_bar, const Tensor<T>& eps) {
  if (x0.shape() != eps.shape()) fail(ErrorCode::shape_mismatch, "q_sample: noise shape differs from x0");
  require(alpha_bar >= 0.0 && alpha_bar <= 1.0, "alpha_bar must lie in [0, 1]");
  const T a = static_cast<T>(std::sqrt(alpha_bar));
  const T b = static_cast<T>(std::sqrt(1.0 - alpha_bar));
  Tensor<T> out(x0.shape());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a * x0[i] + b * eps[i];
  return out;
}

template <typename T>
Tensor<T> q_sample(const Tensor<T>& x0, int t, const Tensor<T>& eps, const NoiseSchedule& sched) {
  if (t < 1 || t > sched.steps)
    fail(ErrorCode::invalid_argument,
         "timestep " + std::to_string(t) + " outside 1.." + std::to_string(sched.steps));
  return q_sample_abar(x0, sched.alpha_bar_at(t), eps);
}

template Tensor<float> q_sample<float>(const Tensor<float>&, int, const Tensor<float>&, const NoiseSchedule&);
template Tensor<double> q_sample<double>(const Tensor<double>&, int, const Tensor<double>&, const NoiseSchedule&);
template Tensor<float> q_sample_abar<float>(const Tensor<float>&, double, const Tensor<float>&);
template Tensor<double> q_sample_abar<double>(const Tensor<double>&, double, const Tensor<double>&);

void DiffusionHyper::validate() const {
  require(epochs >= 1, "epochs must be >= 1");
  require(batch >= 1, "batch must be >= 1");
  require(lr > 0.0 && std::isfinite(lr), "learning rate must be positive");
  require(lr_floor > 0.0 && lr_floor <= 1.0, "lr_floor must lie in (0, 1]");
  require(ema_decay >= 0.0 && ema_decay < 1.0, "ema_decay must lie in [0, 1)");
  make_schedule(steps, beta_min, beta_max);
  arch.validate();
}

std::uint64_t sample_seed(std::uint64_t seed, std::size_t index) {
  return derive_seed(derive_seed(seed, 0x5A3D1E), index);
}

double reward(const SpectrumMatrix& generated, const SpectrumMatrix& expert) {
  if (!(generated.grid == expert.grid) || generated.values.size() != expert.values.size())
    fail(ErrorCode::shape_mismatch, "reward: spectra are on different grids");
  double acc = 0.0;
  for (std::size_t i = 0; i < generated.values.size(); ++i) {
    const double d = static_cast<double>(generated.values[i]) - static_cast<double>(expert.values[i]);
    acc += d * d;
  }
  return -100.0 * acc / static_cast<double>(generated.values.size());
}

std::vector<SpectrumMatrix> run_sampler(const DenoiseFn& denoise_fn, const SpectrumGrid& grid,
                                        const NoiseSchedule& sched,
                                        const std::vector<std::uint64_t>& seeds,
                                        std::vector<std::vector<SpectrumMatrix>>* trajectory) {
  const int batch = static_cast<int>(seeds.size());
  require(batch >= 1, "sampler needs at least one seed");
  const int h = static_cast<int>(grid.rows());
  const int w = static_cast<int>(grid.cols());
  const std::size_t plane = grid.size();

  std::vector<Rng> rngs;
  for (auto s : seeds) rngs.emplace_back(s);
  std::normal_distribution<float> normal(0.0f, 1.0f);

  auto snapshot = [&](const Tensor<float>& x) {
    if (!trajectory) return;
    for (int n = 0; n < batch; ++n) {
      SpectrumMatrix m(grid);
      std::copy(x.data() + n * plane, x.data() + (n + 1) * plane, m.values.begin());
      (*trajectory)[static_cast<std::size_t>(n)].push_back(std::move(m));
    }
  };
  if (trajectory) trajectory->assign(static_cast<std::size_t>(batch), {});

  Tensor<float> x({batch, 1, h, w});
  for (int n = 0; n < batch; ++n) {
    normal.reset();
    for (std::size_t i = 0; i < plane; ++i) x[n * plane + i] = normal(rngs[n]);
  }
  snapshot(x);

  for (int t = sched.steps; t >= 1; --t) {
    Tensor<float> x0 = denoise_fn(x, t);
    if (x0.shape() != x.shape()) fail(ErrorCode::shape_mismatch, "denoiser output shape differs from its input");
    for (std::size_t i = 0; i < x0.size(); ++i) x0[i] = std::clamp(x0[i], 0.0f, 1.0f);
    if (t == 1) {
      x = std::move(x0);
    } else {
      const double abar = sched.alpha_bar_at(t);
      const double abar_prev = sched.alpha_bar_at(t - 1);
      const double beta = sched.beta_at(t);
      const auto c0 = static_cast<float>(std::sqrt(abar_prev) * beta / (1.0 - abar));
      const auto ct = static_cast<float>(std::sqrt(sched.alpha_at(t)) * (1.0 - abar_prev) / (1.0 - abar));
      const auto sigma = static_cast<float>(std::sqrt(beta * (1.0 - abar_prev) / (1.0 - abar)));
      for (int n = 0; n < batch; ++n)
        for (std::size_t i = 0; i < plane; ++i) {
          const std::size_t k = n * plane + i;
          x[k] = c0 * x0[k] + ct * x[k] + sigma * normal(rngs[n]);
        }
    }
    snapshot(x);
  }

  std::vector<SpectrumMatrix> out;
  for (int n = 0; n < batch; ++n) {
    SpectrumMatrix m(grid);
    for (std::size_t i = 0; i < plane; ++i) m.values[i] = std::clamp(x[n * plane + i], 0.0f, 1.0f);
    out.push_back(std::move(m));
  }
  return out;
}

namespace {

Tensor<float> stack_spectra(const std::vector<const SpectrumMatrix*>& specs) {
  const auto& g = specs.front()->grid;
  Tensor<float> out({static_cast<int>(specs.size()), 1, static_cast<int>(g.rows()), static_cast<int>(g.cols())});
  for (std::size_t n = 0; n < specs.size(); ++n)
    std::copy(specs[n]->values.begin(), specs[n]->values.end(), out.data() + n * g.size());
  return out;
}

}  // namespace

std::vector<SpectrumMatrix> sample_batch(const DenoiserModel& model,
                                         const std::vector<const SpectrumMatrix*>& conditions,
                                         const std::vector<std::uint64_t>& seeds,
                                         std::vector<std::vector<SpectrumMatrix>>* trajectory) {
  require(!conditions.empty() && conditions.size() == seeds.size(), "one seed per condition is required");
  for (const auto* c : conditions)
    if (!(c->grid == model.grid) || c->values.size() != model.grid.size())
      fail(ErrorCode::shape_mismatch, "condition spectrum is not on the model grid");
  const Tensor<float> cond = stack_spectra(conditions);
  const DenoiseFn fn = [&](const Tensor<float>& noisy, int t) {
    const std::vector<int> steps(conditions.size(), t);
    return nn::denoise(model.arch, model.params, noisy, cond, steps);
  };
  return run_sampler(fn, model.grid, model.schedule, seeds, trajectory);
}

SpectrumMatrix sample(const DenoiserModel& model, const SpectrumMatrix& condition, std::uint64_t seed,
                      std::vector<SpectrumMatrix>* trajectory) {
  std::vector<std::vector<SpectrumMatrix>> traj;
  auto out = sample_batch(model, {&condition}, {seed}, trajectory ? &traj : nullptr);
  if (trajectory) *trajectory = std::move(traj.front());
  return std::move(out.front());
}

TrainResult train(const std::vector<PairRecord>& train_set, const std::vector<PairRecord>& test_set,
                  const DiffusionHyper& hyper, const EpochCallback& on_epoch) {
  hyper.validate();
  require(!train_set.empty(), "training set is empty");
  const SpectrumGrid grid = train_set.front().pair.clear.grid;
  for (const auto* split : {&train_set, &test_set})
    for (const auto& r : *split)
      if (!(r.pair.clear.grid == grid) || !(r.pair.ambiguous.grid == grid))
        fail(ErrorCode::shape_mismatch, "all pairs must share one grid");

  const auto start = std::chrono::steady_clock::now();
  TrainResult result;
  DenoiserModel& model = result.model;
  model.arch = hyper.arch;
  model.grid = grid;
  model.schedule = make_schedule(hyper.steps, hyper.beta_min, hyper.beta_max);
  model.params = nn::init_params<float>(hyper.arch, derive_seed(hyper.seed, 0x1417));
  nn::ParamStore<float> ema = model.params;

  result.report.seed = hyper.seed;
  result.report.hyper = hyper;

  const int h = static_cast<int>(grid.rows());
  const int w = static_cast<int>(grid.cols());
  const std::size_t plane = grid.size();
  const std::size_t reward_count = std::min(hyper.reward_subset, test_set.size());
  std::vector<std::size_t> order(train_set.size());

  for (int epoch = 1; epoch <= hyper.epochs; ++epoch) {
    const auto epoch_start = std::chrono::steady_clock::now();
    Rng rng(derive_seed(hyper.seed, static_cast<std::uint64_t>(epoch)));
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    std::uniform_int_distribution<int> pick_step(1, hyper.steps);
    std::normal_distribution<float> normal(0.0f, 1.0f);

    const double progress = hyper.epochs > 1 ? (epoch - 1.0) / (hyper.epochs - 1.0) : 1.0;
    const double lr =
        hyper.lr * (hyper.lr_floor + (1.0 - hyper.lr_floor) * 0.5 * (1.0 + std::cos(kPi * progress)));

    double loss_sum = 0.0;
    for (std::size_t begin = 0; begin < order.size(); begin += static_cast<std::size_t>(hyper.batch)) {
      const std::size_t end = std::min(order.size(), begin + static_cast<std::size_t>(hyper.batch));
      const int b = static_cast<int>(end - begin);
      Tensor<float> clean({b, 1, h, w}), noisy({b, 1, h, w}), cond({b, 1, h, w});
      std::vector<int> steps(static_cast<std::size_t>(b));
      for (int n = 0; n < b; ++n) {
        const auto& pair = train_set[order[begin + static_cast<std::size_t>(n)]].pair;
        steps[n] = pick_step(rng);
        const auto a = static_cast<float>(std::sqrt(model.schedule.alpha_bar_at(steps[n])));
        const auto s = static_cast<float>(std::sqrt(1.0 - model.schedule.alpha_bar_at(steps[n])));
        for (std::size_t i = 0; i < plane; ++i) {
          const float x0 = pair.clear.values[i];
          clean[n * plane + i] = x0;
          noisy[n * plane + i] = a * x0 + s * normal(rng);
          cond[n * plane + i] = pair.ambiguous.values[i];
        }
      }

      nn::Tape<float> tape;
      const auto p = nn::bind_params(tape, model.params, true);
      const nn::Var pred = nn::denoiser_forward(tape, model.arch, p, tape.constant(std::move(noisy)),
                                                tape.constant(std::move(cond)), steps);
      const nn::Var loss = tape.mse_loss(pred, tape.constant(std::move(clean)));
      const double loss_value = tape.value(loss)[0];
      if (!std::isfinite(loss_value))
        fail(ErrorCode::numeric, "training diverged: non-finite loss at epoch " + std::to_string(epoch));
      tape.backward(loss);

      std::map<std::string, Tensor<float>> grads;
      for (const auto& [name, var] : p) grads[name] = tape.grad(var);
      nn::adam_step(model.params, grads, lr);
      if (hyper.ema_decay > 0.0) {
        const auto d = static_cast<float>(hyper.ema_decay);
        for (std::size_t e = 0; e < ema.entries().size(); ++e) {
          auto& dst = ema.entries()[e].value;
          const auto& src = model.params.entries()[e].value;
          for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = d * dst[i] + (1.0f - d) * src[i];
        }
      }
      loss_sum += loss_value * b;
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = loss_sum / static_cast<double>(order.size());
    if (reward_count > 0) {
      DenoiserModel scored = model;
      if (hyper.ema_decay > 0.0) scored.params = ema;
      std::vector<const SpectrumMatrix*> conds;
      std::vector<std::uint64_t> seeds;
      for (std::size_t i = 0; i < reward_count; ++i) {
        conds.push_back(&test_set[i].pair.ambiguous);
        seeds.push_back(sample_seed(hyper.seed, i));
      }
      const auto generated = sample_batch(scored, conds, seeds);
      double total = 0.0;
      for (std::size_t i = 0; i < reward_count; ++i) total += reward(generated[i], test_set[i].pair.clear);
      rec.test_reward = total / static_cast<double>(reward_count);
    } else {
      rec.test_reward = std::numeric_limits<double>::quiet_NaN();
    }
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - epoch_start).count();
    result.report.epochs.push_back(rec);
    if (on_epoch) on_epoch(rec);
  }
  if (hyper.ema_decay > 0.0) {
    for (std::size_t e = 0; e < ema.entries().size(); ++e)
      model.params.entries()[e].value = ema.entries()[e].value;
  }
  result.report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

// ---------------------------------------------------------------------------
// Model file: "SSGMODEL", u32 version, u64 header bytes, header JSON,
// u64 blob bytes, f32 blob, u32 crc32 of everything before it.

namespace {

constexpr char kModelMagic[8] = {'S', 'S', 'G', 'M', 'O', 'D', 'E', 'L'};
constexpr std::uint32_t kModelVersion = 1;

json grid_json(const SpectrumGrid& g) {
  auto axis = [](const Axis& a) { return json{{"start", a.start}, {"step", a.step}, {"count", a.count}}; };
  return {{"theta", axis(g.theta)}, {"range", axis(g.range)}};
}

Axis axis_from_json(const json& j) {
  return {j.at("start").get<double>(), j.at("step").get<double>(), j.at("count").get<std::size_t>()};
}

}  // namespace

std::string serialize_model(const DenoiserModel& model) {
  const json header = {
      {"architecture", nn::architecture_descriptor(model.arch)},
      {"schedule",
       {{"steps", model.schedule.steps},
        {"beta_min", model.schedule.beta_min},
        {"beta_max", model.schedule.beta_max},
        {"shape", "linear"},
        {"parameterization", "x0"}}},
      {"grid", grid_json(model.grid)},
      {"parameter_count", model.params.parameter_count()},
  };
  const std::string header_text = header.dump(2);
  const std::string blob = nn::param_blob(model.params);
  io::ByteWriter w;
  w.put_bytes(kModelMagic, sizeof(kModelMagic));
  w.put<std::uint32_t>(kModelVersion);
  w.put<std::uint64_t>(header_text.size());
  w.put_bytes(header_text.data(), header_text.size());
  w.put<std::uint64_t>(blob.size());
  w.put_bytes(blob.data(), blob.size());
  w.put<std::uint32_t>(io::crc32(w.bytes()));
  return w.bytes();
}

DenoiserModel deserialize_model(std::string_view bytes, const std::string& path) {
  io::ByteReader r(bytes, path);
  char magic[8];
  r.read_into(magic, sizeof(magic));
  if (!std::equal(magic, magic + 8, kModelMagic)) fail(ErrorCode::format, "not an SSG model file", path);
  const auto version = r.get<std::uint32_t>();
  if (version != kModelVersion)
    fail(ErrorCode::format, "unsupported model version " + std::to_string(version), path);
  const auto header_len = r.get<std::uint64_t>();
  if (header_len > r.remaining()) fail(ErrorCode::format, "truncated model header", path);
  std::string header_text(header_len, '\0');
  r.read_into(header_text.data(), header_len);
  const auto blob_len = r.get<std::uint64_t>();
  if (blob_len + sizeof(std::uint32_t) != r.remaining())
    fail(ErrorCode::format,
         "model length mismatch: header promises " + std::to_string(blob_len) + " blob bytes plus checksum, " +
             std::to_string(r.remaining()) + " bytes remain",
         path);
  const std::size_t blob_end = r.offset() + blob_len;
  std::string blob(blob_len, '\0');
  r.read_into(blob.data(), blob_len);
  const auto stored_crc = r.get<std::uint32_t>();
  const auto crc = io::crc32(bytes.substr(0, blob_end));
  if (crc != stored_crc)
    fail(ErrorCode::checksum, "model checksum mismatch: stored " + io::hex32(stored_crc) + ", computed " + io::hex32(crc),
         path);

  DenoiserModel model;
  try {
    const json header = json::parse(header_text);
    model.arch = nn::architecture_from_descriptor(header.at("architecture"));
    const json& s = header.at("schedule");
    if (s.at("shape").get<std::string>() != "linear" || s.at("parameterization").get<std::string>() != "x0")
      fail(ErrorCode::format, "unsupported schedule record", path);
    model.schedule = make_schedule(s.at("steps").get<int>(), s.at("beta_min").get<double>(),
                                   s.at("beta_max").get<double>());
    model.grid = {axis_from_json(header.at("grid").at("theta")), axis_from_json(header.at("grid").at("range"))};
    model.grid.validate();
  } catch (const json::exception& e) {
    fail(ErrorCode::format, std::string("malformed model header: ") + e.what(), path);
  }
  model.params = nn::params_from_blob(model.arch, blob, path);
  return model;
}

void save_model(const DenoiserModel& model, const std::filesystem::path& path) {
  io::write_file_atomic(path, serialize_model(model));
}

DenoiserModel load_model(const std::filesystem::path& path) {
  const std::string bytes = io::read_file(path);
  return deserialize_model(bytes, path.string());
}

std::string report_csv(const TrainReport& report) {
  std::string out = "epoch,train_loss,test_reward\n";
  char buf[96];
  for (const auto& e : report.epochs) {
    std::snprintf(buf, sizeof(buf), "%d,%.8g,%.8g\n", e.epoch, e.train_loss, e.test_reward);
    out += buf;
  }
  return out;
}

json to_json(const DiffusionHyper& h) {
  return {
      {"epochs", h.epochs},
      {"batch", h.batch},
      {"lr", h.lr},
      {"lr_floor", h.lr_floor},
      {"steps", h.steps},
      {"beta_min", h.beta_min},
      {"beta_max", h.beta_max},
      {"seed", h.seed},
      {"reward_subset", h.reward_subset},
      {"ema_decay", h.ema_decay},
      {"architecture",
       {{"embedding_dim", h.arch.embedding_dim},
        {"stem_channels", h.arch.stem_channels},
        {"width", h.arch.width},
        {"head_channels", h.arch.head_channels},
        {"coordinate_channels", h.arch.coordinate_channels},
        {"dilations", h.arch.dilations}}},
  };
}

DiffusionHyper diffusion_hyper_from_json(const json& j, DiffusionHyper h) {
  json_util::visit_object(j, "diffusion", [&](const std::string& k, const json& v) {
    if (k == "epochs") h.epochs = v.get<int>();
    else if (k == "batch") h.batch = v.get<int>();
    else if (k == "lr") h.lr = v.get<double>();
    else if (k == "lr_floor") h.lr_floor = v.get<double>();
    else if (k == "steps") h.steps = v.get<int>();
    else if (k == "beta_min") h.beta_min = v.get<double>();
    else if (k == "beta_max") h.beta_max = v.get<double>();
    else if (k == "seed") h.seed = v.get<std::uint64_t>();
    else if (k == "reward_subset") h.reward_subset = v.get<std::size_t>();
    else if (k == "ema_decay") h.ema_decay = v.get<double>();
    else if (k == "architecture") {
      json_util::visit_object(v, "diffusion.architecture", [&](const std::string& ak, const json& av) {
        if (ak == "embedding_dim") h.arch.embedding_dim = av.get<int>();
        else if (ak == "stem_channels") h.arch.stem_channels = av.get<int>();
        else if (ak == "width") h.arch.width = av.get<int>();
        else if (ak == "head_channels") h.arch.head_channels = av.get<int>();
        else if (ak == "coordinate_channels") h.arch.coordinate_channels = av.get<bool>();
        else if (ak == "dilations") h.arch.dilations = av.get<std::vector<int>>();
        else return false;
        return true;
      });
    } else {
      return false;
    }
    return true;
  });
  return h;
}

}  // namespace ssg
