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

#include "ssg/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include <Eigen/Dense>

#include "ssg/error.hpp"

namespace ssg::nn {

namespace {

template <typename T>
using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using RowMap = Eigen::Map<RowMat<T>>;
template <typename T>
using ConstRowMap = Eigen::Map<const RowMat<T>>;

[[noreturn]] void shape_error(const std::string& op, const std::string& detail) {
  fail(ErrorCode::shape_mismatch, op + ": " + detail);
}

void expect_rank(const std::string& op, const std::vector<int>& shape, std::size_t rank) {
  if (shape.size() != rank)
    shape_error(op, "expected rank " + std::to_string(rank) + ", got " + shape_string(shape));
}

struct ConvGeometry {
  int channels, height, width, kernel, dilation;
  int pad() const { return (kernel / 2) * dilation; }
  int rows() const { return channels * kernel * kernel; }
  int pixels() const { return height * width; }
};

// cols is rows() x pixels(), row-major; row index (c * k + ky) * k + kx.
template <typename T>
void im2col(const T* image, const ConvGeometry& g, T* cols) {
  const int hw = g.pixels();
  for (int c = 0; c < g.channels; ++c) {
    const T* plane = image + static_cast<std::size_t>(c) * hw;
    for (int ky = 0; ky < g.kernel; ++ky) {
      const int dy = ky * g.dilation - g.pad();
      for (int kx = 0; kx < g.kernel; ++kx) {
        const int dx = kx * g.dilation - g.pad();
        T* row = cols + static_cast<std::size_t>((c * g.kernel + ky) * g.kernel + kx) * hw;
        const int x_lo = std::max(0, -dx);
        const int x_hi = std::min(g.width, g.width - dx);
        for (int y = 0; y < g.height; ++y) {
          T* out = row + static_cast<std::size_t>(y) * g.width;
          const int sy = y + dy;
          if (sy < 0 || sy >= g.height || x_lo >= x_hi) {
            std::fill(out, out + g.width, T(0));
            continue;
          }
          std::fill(out, out + x_lo, T(0));
          const T* src = plane + static_cast<std::size_t>(sy) * g.width + dx;
          std::copy(src + x_lo, src + x_hi, out + x_lo);
          std::fill(out + x_hi, out + g.width, T(0));
        }
      }
    }
  }
}

template <typename T>
void col2im_add(const T* cols, const ConvGeometry& g, T* image) {
  const int hw = g.pixels();
  for (int c = 0; c < g.channels; ++c) {
    T* plane = image + static_cast<std::size_t>(c) * hw;
    for (int ky = 0; ky < g.kernel; ++ky) {
      const int dy = ky * g.dilation - g.pad();
      for (int kx = 0; kx < g.kernel; ++kx) {
        const int dx = kx * g.dilation - g.pad();
        const T* row = cols + static_cast<std::size_t>((c * g.kernel + ky) * g.kernel + kx) * hw;
        const int x_lo = std::max(0, -dx);
        const int x_hi = std::min(g.width, g.width - dx);
        for (int y = 0; y < g.height; ++y) {
          const int sy = y + dy;
          if (sy < 0 || sy >= g.height) continue;
          const T* in = row + static_cast<std::size_t>(y) * g.width;
          T* dst = plane + static_cast<std::size_t>(sy) * g.width + dx;
          for (int x = x_lo; x < x_hi; ++x) dst[x] += in[x];
        }
      }
    }
  }
}

template <typename T>
T sigmoid(T x) {
  return T(1) / (T(1) + std::exp(-x));
}

}  // namespace

std::size_t shape_size(const std::vector<int>& shape) {
  std::size_t n = 1;
  for (int d : shape) {
    if (d < 0) fail(ErrorCode::shape_mismatch, "negative dimension in " + shape_string(shape));
    n *= static_cast<std::size_t>(d);
  }
  return n;
}

std::string shape_string(const std::vector<int>& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) s += (i ? "," : "") + std::to_string(shape[i]);
  return s + "]";
}

template <typename T>
Tensor<T>::Tensor(std::vector<int> shape, T fill) : shape_(std::move(shape)) {
  if (shape_.empty() || shape_.size() > 4)
    fail(ErrorCode::shape_mismatch, "tensors have 1 to 4 axes");
  data_.assign(shape_size(shape_), fill);
}

template <typename T>
Tensor<T>::Tensor(std::vector<int> shape, std::vector<T> data)
    : shape_(std::move(shape)), data_(data.begin(), data.end()) {
  if (shape_.empty() || shape_.size() > 4)
    fail(ErrorCode::shape_mismatch, "tensors have 1 to 4 axes");
  if (data_.size() != shape_size(shape_))
    fail(ErrorCode::shape_mismatch, "value count " + std::to_string(data_.size()) +
                                        " does not match shape " + shape_string(shape_));
}

template <typename T>
bool Tensor<T>::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](T v) { return std::isfinite(v); });
}

// ---------------------------------------------------------------------------
// Tape

template <typename T>
Var Tape<T>::push(Tensor<T> value, bool requires_grad, std::function<void()> backward) {
  if (check_finite_ && !value.all_finite())
    fail(ErrorCode::numeric, "non-finite value produced by op #" + std::to_string(nodes_.size()));
  nodes_.push_back({std::move(value), {}, requires_grad, std::move(backward)});
  return {nodes_.size() - 1};
}

template <typename T>
Var Tape<T>::constant(Tensor<T> value) {
  return push(std::move(value), false);
}

template <typename T>
Var Tape<T>::leaf(Tensor<T> value) {
  return push(std::move(value), true);
}

template <typename T>
Tensor<T>& Tape<T>::grad_ref(std::size_t id) {
  Node& n = nodes_.at(id);
  if (n.grad.size() != n.value.size() || n.grad.shape() != n.value.shape())
    n.grad = Tensor<T>(n.value.shape());
  return n.grad;
}

template <typename T>
const Tensor<T>& Tape<T>::grad(Var v) {
  return grad_ref(v.id);
}

template <typename T>
void Tape<T>::backward(Var scalar) {
  if (value(scalar).size() != 1) shape_error("backward", "target must hold a single value");
  for (auto& n : nodes_) n.grad = Tensor<T>();
  grad_ref(scalar.id)[0] = T(1);
  for (std::size_t i = scalar.id + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (n.backward && n.requires_grad && n.grad.size() == n.value.size()) n.backward();
  }
}

template <typename T>
Var Tape<T>::conv2d(Var xv, Var wv, Var bv, int dilation) {
  const auto& xs = value(xv).shape();
  const auto& ws = value(wv).shape();
  expect_rank("conv2d input", xs, 4);
  expect_rank("conv2d weights", ws, 4);
  expect_rank("conv2d bias", value(bv).shape(), 1);
  if (ws[2] != ws[3] || ws[2] % 2 == 0) shape_error("conv2d", "kernel must be square and odd");
  if (ws[1] != xs[1])
    shape_error("conv2d", "input has " + std::to_string(xs[1]) + " channels, weights expect " +
                              std::to_string(ws[1]));
  if (value(bv).dim(0) != ws[0]) shape_error("conv2d", "bias length differs from output channels");
  if (dilation < 1) shape_error("conv2d", "dilation must be >= 1");

  const int batch = xs[0];
  const int cout = ws[0];
  const ConvGeometry g{xs[1], xs[2], xs[3], ws[2], dilation};
  const int k = g.rows();
  const int hw = g.pixels();

  Tensor<T> out({batch, cout, g.height, g.width});
  // Unfolded inputs are only needed again for the weight gradient.
  const bool keep_cols = needs(wv);
  auto cols = std::make_shared<std::vector<RowMat<T>>>(keep_cols ? static_cast<std::size_t>(batch) : 1);
  ConstRowMap<T> wm(value(wv).data(), cout, k);
  const T* bias = value(bv).data();
  for (int n = 0; n < batch; ++n) {
    RowMat<T>& c = (*cols)[keep_cols ? static_cast<std::size_t>(n) : 0];
    c.resize(k, hw);
    im2col(value(xv).data() + static_cast<std::size_t>(n) * g.channels * hw, g, c.data());
    RowMap<T> o(out.data() + static_cast<std::size_t>(n) * cout * hw, cout, hw);
    o.noalias() = wm * c;
    for (int oc = 0; oc < cout; ++oc) o.row(oc).array() += bias[oc];
  }

  const bool rg = needs(xv) || needs(wv) || needs(bv);
  Var result = push(std::move(out), rg);
  const std::size_t id = result.id;
  if (rg) {
    nodes_[id].backward = [this, id, xv, wv, bv, g, cout, batch, cols] {
      const int k = g.rows();
      const int hw = g.pixels();
      const Tensor<T>& dy = nodes_[id].grad;
      ConstRowMap<T> wm(value(wv).data(), cout, k);
      RowMat<T> dcols;
      for (int n = 0; n < batch; ++n) {
        ConstRowMap<T> d(dy.data() + static_cast<std::size_t>(n) * cout * hw, cout, hw);
        if (needs(wv)) {
          RowMap<T> dw(grad_ref(wv.id).data(), cout, k);
          dw.noalias() += d * (*cols)[n].transpose();
        }
        if (needs(bv)) {
          T* db = grad_ref(bv.id).data();
          for (int oc = 0; oc < cout; ++oc) db[oc] += d.row(oc).sum();
        }
        if (needs(xv)) {
          dcols.noalias() = wm.transpose() * d;
          col2im_add(dcols.data(), g,
                     grad_ref(xv.id).data() + static_cast<std::size_t>(n) * g.channels * hw);
        }
      }
    };
  }
  return result;
}

template <typename T>
Var Tape<T>::dense(Var xv, Var wv, Var bv) {
  const auto& xs = value(xv).shape();
  const auto& ws = value(wv).shape();
  expect_rank("dense input", xs, 2);
  expect_rank("dense weights", ws, 2);
  expect_rank("dense bias", value(bv).shape(), 1);
  if (ws[1] != xs[1]) shape_error("dense", "input width differs from weight columns");
  if (value(bv).dim(0) != ws[0]) shape_error("dense", "bias length differs from output width");
  const int batch = xs[0], in = xs[1], outw = ws[0];

  Tensor<T> out({batch, outw});
  ConstRowMap<T> x(value(xv).data(), batch, in);
  ConstRowMap<T> w(value(wv).data(), outw, in);
  RowMap<T> y(out.data(), batch, outw);
  y.noalias() = x * w.transpose();
  for (int n = 0; n < batch; ++n)
    for (int o = 0; o < outw; ++o) y(n, o) += value(bv)[static_cast<std::size_t>(o)];

  const bool rg = needs(xv) || needs(wv) || needs(bv);
  Var result = push(std::move(out), rg);
  const std::size_t id = result.id;
  if (rg) {
    nodes_[id].backward = [this, id, xv, wv, bv, batch, in, outw] {
      ConstRowMap<T> dy(nodes_[id].grad.data(), batch, outw);
      if (needs(wv)) {
        RowMap<T> dw(grad_ref(wv.id).data(), outw, in);
        dw.noalias() += dy.transpose() * ConstRowMap<T>(value(xv).data(), batch, in);
      }
      if (needs(bv)) {
        T* db = grad_ref(bv.id).data();
        for (int o = 0; o < outw; ++o) db[o] += dy.col(o).sum();
      }
      if (needs(xv)) {
        RowMap<T> dx(grad_ref(xv.id).data(), batch, in);
        dx.noalias() += dy * ConstRowMap<T>(value(wv).data(), outw, in);
      }
    };
  }
  return result;
}

template <typename T>
Var Tape<T>::silu(Var xv) {
  const Tensor<T>& x = value(xv);
  Tensor<T> out(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] * sigmoid(x[i]);
  Var result = push(std::move(out), needs(xv));
  const std::size_t id = result.id;
  if (needs(xv)) {
    nodes_[id].backward = [this, id, xv] {
      const Tensor<T>& x = value(xv);
      const Tensor<T>& dy = nodes_[id].grad;
      Tensor<T>& dx = grad_ref(xv.id);
      for (std::size_t i = 0; i < x.size(); ++i) {
        const T s = sigmoid(x[i]);
        dx[i] += dy[i] * (s + x[i] * s * (T(1) - s));
      }
    };
  }
  return result;
}

template <typename T>
Var Tape<T>::relu(Var xv) {
  const Tensor<T>& x = value(xv);
  Tensor<T> out(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] > T(0) ? x[i] : T(0);
  Var result = push(std::move(out), needs(xv));
  const std::size_t id = result.id;
  if (needs(xv)) {
    nodes_[id].backward = [this, id, xv] {
      const Tensor<T>& x = value(xv);
      const Tensor<T>& dy = nodes_[id].grad;
      Tensor<T>& dx = grad_ref(xv.id);
      for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i] > T(0)) dx[i] += dy[i];
    };
  }
  return result;
}

template <typename T>
Var Tape<T>::add(Var av, Var bv) {
  if (value(av).shape() != value(bv).shape())
    shape_error("add", shape_string(value(av).shape()) + " vs " + shape_string(value(bv).shape()));
  Tensor<T> out = value(av);
  const Tensor<T>& b = value(bv);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += b[i];
  const bool rg = needs(av) || needs(bv);
  Var result = push(std::move(out), rg);
  const std::size_t id = result.id;
  if (rg) {
    nodes_[id].backward = [this, id, av, bv] {
      const Tensor<T>& dy = nodes_[id].grad;
      for (Var v : {av, bv}) {
        if (!needs(v)) continue;
        Tensor<T>& g = grad_ref(v.id);
        for (std::size_t i = 0; i < dy.size(); ++i) g[i] += dy[i];
      }
    };
  }
  return result;
}

template <typename T>
Var Tape<T>::concat_channels(const std::vector<Var>& parts) {
  if (parts.empty()) shape_error("concat", "no inputs");
  const auto& s0 = value(parts[0]).shape();
  expect_rank("concat", s0, 4);
  int channels = 0;
  bool rg = false;
  for (Var p : parts) {
    const auto& s = value(p).shape();
    expect_rank("concat", s, 4);
    if (s[0] != s0[0] || s[2] != s0[2] || s[3] != s0[3])
      shape_error("concat", shape_string(s) + " vs " + shape_string(s0));
    channels += s[1];
    rg = rg || needs(p);
  }
  const int batch = s0[0];
  const std::size_t hw = static_cast<std::size_t>(s0[2]) * s0[3];
  Tensor<T> out({batch, channels, s0[2], s0[3]});
  for (int n = 0; n < batch; ++n) {
    T* dst = out.data() + static_cast<std::size_t>(n) * channels * hw;
    for (Var p : parts) {
      const std::size_t block = static_cast<std::size_t>(value(p).dim(1)) * hw;
      const T* src = value(p).data() + static_cast<std::size_t>(n) * block;
      dst = std::copy(src, src + block, dst);
    }
  }
  Var result = push(std::move(out), rg);
  const std::size_t id = result.id;
  if (rg) {
    nodes_[id].backward = [this, id, parts, batch, channels, hw] {
      const Tensor<T>& dy = nodes_[id].grad;
      for (int n = 0; n < batch; ++n) {
        const T* src = dy.data() + static_cast<std::size_t>(n) * channels * hw;
        for (Var p : parts) {
          const std::size_t block = static_cast<std::size_t>(value(p).dim(1)) * hw;
          if (needs(p)) {
            T* dst = grad_ref(p.id).data() + static_cast<std::size_t>(n) * block;
            for (std::size_t i = 0; i < block; ++i) dst[i] += src[i];
          }
          src += block;
        }
      }
    };
  }
  return result;
}

template <typename T>
Var Tape<T>::add_channel_bias(Var xv, Var biasv) {
  const auto& xs = value(xv).shape();
  const auto& bs = value(biasv).shape();
  expect_rank("add_channel_bias input", xs, 4);
  expect_rank("add_channel_bias bias", bs, 2);
  if (bs[0] != xs[0] || bs[1] != xs[1])
    shape_error("add_channel_bias", shape_string(bs) + " does not match " + shape_string(xs));
  const std::size_t hw = static_cast<std::size_t>(xs[2]) * xs[3];
  Tensor<T> out = value(xv);
  const Tensor<T>& bias = value(biasv);
  for (std::size_t plane = 0; plane < bias.size(); ++plane)
    for (std::size_t i = 0; i < hw; ++i) out[plane * hw + i] += bias[plane];
  const bool rg = needs(xv) || needs(biasv);
  Var result = push(std::move(out), rg);
  const std::size_t id = result.id;
  if (rg) {
    nodes_[id].backward = [this, id, xv, biasv, hw] {
      const Tensor<T>& dy = nodes_[id].grad;
      if (needs(xv)) {
        Tensor<T>& dx = grad_ref(xv.id);
        for (std::size_t i = 0; i < dy.size(); ++i) dx[i] += dy[i];
      }
      if (needs(biasv)) {
        Tensor<T>& db = grad_ref(biasv.id);
        for (std::size_t plane = 0; plane < db.size(); ++plane) {
          T acc = 0;
          for (std::size_t i = 0; i < hw; ++i) acc += dy[plane * hw + i];
          db[plane] += acc;
        }
      }
    };
  }
  return result;
}

template <typename T>
Var Tape<T>::broadcast_planes(Var vv, int height, int width) {
  const auto& vs = value(vv).shape();
  expect_rank("broadcast_planes", vs, 2);
  if (height < 1 || width < 1) shape_error("broadcast_planes", "plane must be non-empty");
  const std::size_t hw = static_cast<std::size_t>(height) * width;
  Tensor<T> out({vs[0], vs[1], height, width});
  const Tensor<T>& v = value(vv);
  for (std::size_t plane = 0; plane < v.size(); ++plane)
    std::fill(out.data() + plane * hw, out.data() + (plane + 1) * hw, v[plane]);
  Var result = push(std::move(out), needs(vv));
  const std::size_t id = result.id;
  if (needs(vv)) {
    nodes_[id].backward = [this, id, vv, hw] {
      const Tensor<T>& dy = nodes_[id].grad;
      Tensor<T>& dv = grad_ref(vv.id);
      for (std::size_t plane = 0; plane < dv.size(); ++plane) {
        T acc = 0;
        for (std::size_t i = 0; i < hw; ++i) acc += dy[plane * hw + i];
        dv[plane] += acc;
      }
    };
  }
  return result;
}

template <typename T>
Var Tape<T>::mse_loss(Var pv, Var tv) {
  if (value(pv).shape() != value(tv).shape())
    shape_error("mse_loss", shape_string(value(pv).shape()) + " vs " + shape_string(value(tv).shape()));
  const Tensor<T>& p = value(pv);
  const Tensor<T>& t = value(tv);
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double d = static_cast<double>(p[i]) - static_cast<double>(t[i]);
    acc += d * d;
  }
  Tensor<T> out({1}, static_cast<T>(acc / static_cast<double>(p.size())));
  const bool rg = needs(pv) || needs(tv);
  Var result = push(std::move(out), rg);
  const std::size_t id = result.id;
  if (rg) {
    nodes_[id].backward = [this, id, pv, tv] {
      const Tensor<T>& p = value(pv);
      const Tensor<T>& t = value(tv);
      const T scale = nodes_[id].grad[0] * T(2) / static_cast<T>(p.size());
      if (needs(pv)) {
        Tensor<T>& g = grad_ref(pv.id);
        for (std::size_t i = 0; i < p.size(); ++i) g[i] += scale * (p[i] - t[i]);
      }
      if (needs(tv)) {
        Tensor<T>& g = grad_ref(tv.id);
        for (std::size_t i = 0; i < p.size(); ++i) g[i] -= scale * (p[i] - t[i]);
      }
    };
  }
  return result;
}

template <typename T>
Var Tape<T>::sum(Var xv) {
  const Tensor<T>& x = value(xv);
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += static_cast<double>(x[i]);
  Var result = push(Tensor<T>({1}, static_cast<T>(acc)), needs(xv));
  const std::size_t id = result.id;
  if (needs(xv)) {
    nodes_[id].backward = [this, id, xv] {
      const T d = nodes_[id].grad[0];
      Tensor<T>& g = grad_ref(xv.id);
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += d;
    };
  }
  return result;
}

// ---------------------------------------------------------------------------
// Parameters and optimizer

template <typename T>
std::size_t ParamStore<T>::add(const std::string& name, Tensor<T> value) {
  if (index_.count(name)) fail(ErrorCode::invalid_argument, "duplicate parameter '" + name + "'");
  Tensor<T> zeros(value.shape());
  entries_.push_back({name, std::move(value), zeros, zeros});
  index_[name] = entries_.size() - 1;
  return entries_.size() - 1;
}

template <typename T>
const Tensor<T>& ParamStore<T>::get(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) fail(ErrorCode::invalid_argument, "unknown parameter '" + name + "'");
  return entries_[it->second].value;
}

template <typename T>
Tensor<T>& ParamStore<T>::get(const std::string& name) {
  auto it = index_.find(name);
  if (it == index_.end()) fail(ErrorCode::invalid_argument, "unknown parameter '" + name + "'");
  return entries_[it->second].value;
}

template <typename T>
std::size_t ParamStore<T>::parameter_count() const {
  std::size_t n = 0;
  for (const auto& e : entries_) n += e.value.size();
  return n;
}

template <typename T>
std::vector<T> ParamStore<T>::flatten() const {
  std::vector<T> flat;
  flat.reserve(parameter_count());
  for (const auto& e : entries_) flat.insert(flat.end(), e.value.values().begin(), e.value.values().end());
  return flat;
}

template <typename T>
void ParamStore<T>::unflatten(const std::vector<T>& flat) {
  if (flat.size() != parameter_count())
    fail(ErrorCode::format, "parameter blob holds " + std::to_string(flat.size()) +
                                " values, architecture needs " + std::to_string(parameter_count()));
  std::size_t offset = 0;
  for (auto& e : entries_) {
    std::copy(flat.begin() + static_cast<std::ptrdiff_t>(offset),
              flat.begin() + static_cast<std::ptrdiff_t>(offset + e.value.size()), e.value.data());
    offset += e.value.size();
  }
}

template <typename T>
void adam_step(ParamStore<T>& store, const std::map<std::string, Tensor<T>>& grads, double lr,
               double beta1, double beta2, double eps) {
  for (const auto& e : store.entries_) {
    auto it = grads.find(e.name);
    if (it == grads.end()) fail(ErrorCode::invalid_argument, "missing gradient for '" + e.name + "'");
    if (it->second.shape() != e.value.shape())
      fail(ErrorCode::shape_mismatch, "gradient shape for '" + e.name + "' differs from parameter");
  }
  ++store.step_;
  const double c1 = 1.0 - std::pow(beta1, static_cast<double>(store.step_));
  const double c2 = 1.0 - std::pow(beta2, static_cast<double>(store.step_));
  const T b1 = static_cast<T>(beta1), b2 = static_cast<T>(beta2);
  const T step = static_cast<T>(lr / c1);
  const T root_c2 = static_cast<T>(std::sqrt(c2));
  const T epsilon = static_cast<T>(eps);
  for (auto& e : store.entries_) {
    const Tensor<T>& g = grads.at(e.name);
    for (std::size_t i = 0; i < g.size(); ++i) {
      e.m[i] = b1 * e.m[i] + (T(1) - b1) * g[i];
      e.v[i] = b2 * e.v[i] + (T(1) - b2) * g[i] * g[i];
      e.value[i] -= step * e.m[i] / (std::sqrt(e.v[i]) / root_c2 + epsilon);
    }
  }
}

template class Tensor<float>;
template class Tensor<double>;
template class Tape<float>;
template class Tape<double>;
template class ParamStore<float>;
template class ParamStore<double>;
template void adam_step<float>(ParamStore<float>&, const std::map<std::string, Tensor<float>>&,
                               double, double, double, double);
template void adam_step<double>(ParamStore<double>&, const std::map<std::string, Tensor<double>>&,
                                double, double, double, double);

}  // namespace ssg::nn
