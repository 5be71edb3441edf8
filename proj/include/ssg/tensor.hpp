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

#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <new>
#include <string>
#include <vector>

namespace ssg::nn {

/// Cache-line aligned allocation. Vectorized reductions peel their head by
/// pointer alignment, so unaligned buffers would make float sums differ run to run.
template <typename T>
struct AlignedAllocator {
  using value_type = T;
  static constexpr std::align_val_t alignment{64};

  AlignedAllocator() = default;
  template <typename U>
  AlignedAllocator(const AlignedAllocator<U>&) noexcept {}

  T* allocate(std::size_t n) { return static_cast<T*>(::operator new(n * sizeof(T), alignment)); }
  void deallocate(T* p, std::size_t) noexcept { ::operator delete(p, alignment); }

  template <typename U>
  bool operator==(const AlignedAllocator<U>&) const noexcept {
    return true;
  }
};

template <typename T>
using Buffer = std::vector<T, AlignedAllocator<T>>;

/// Dense row-major tensor of up to four axes (batch, channel, height, width).
template <typename T>
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<int> shape, T fill = T(0));
  Tensor(std::vector<int> shape, std::vector<T> data);

  const std::vector<int>& shape() const { return shape_; }
  int dim(std::size_t axis) const { return shape_.at(axis); }
  std::size_t rank() const { return shape_.size(); }
  std::size_t size() const { return data_.size(); }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }
  Buffer<T>& values() { return data_; }
  const Buffer<T>& values() const { return data_; }

  T& operator[](std::size_t i) { return data_[i]; }
  T operator[](std::size_t i) const { return data_[i]; }

  /// Element (n, c, h, w) of a rank-4 tensor.
  T& at(int n, int c, int h, int w) { return data_[offset(n, c, h, w)]; }
  T at(int n, int c, int h, int w) const { return data_[offset(n, c, h, w)]; }

  bool all_finite() const;
  bool operator==(const Tensor&) const = default;

  template <typename U>
  Tensor<U> cast() const {
    Tensor<U> out(shape_);
    for (std::size_t i = 0; i < data_.size(); ++i) out[i] = static_cast<U>(data_[i]);
    return out;
  }

 private:
  std::size_t offset(int n, int c, int h, int w) const {
    return ((static_cast<std::size_t>(n) * shape_[1] + c) * shape_[2] + h) * shape_[3] + w;
  }

  std::vector<int> shape_;
  Buffer<T> data_;
};

std::size_t shape_size(const std::vector<int>& shape);
std::string shape_string(const std::vector<int>& shape);

/// Handle to a value recorded on a Tape.
struct Var {
  std::size_t id = 0;
};

/// Reverse-mode recorder over a fixed menu of ops. Build the forward pass with the
/// op methods, call backward() on a scalar, then read grad() of any recorded value.
template <typename T>
class Tape {
 public:
  /// Non-differentiable input.
  Var constant(Tensor<T> value);
  /// Differentiable leaf; its gradient is kept after backward().
  Var leaf(Tensor<T> value);

  const Tensor<T>& value(Var v) const { return nodes_.at(v.id).value; }
  /// Gradient of the last backward() target; zeros if the value did not contribute.
  const Tensor<T>& grad(Var v);

  /// Same-padding cross-correlation. x [B,Cin,H,W], w [Cout,Cin,k,k] (k odd), b [Cout].
  Var conv2d(Var x, Var w, Var b, int dilation = 1);
  /// x [B,In], w [Out,In], b [Out] -> [B,Out].
  Var dense(Var x, Var w, Var b);
  /// x * sigmoid(x).
  Var silu(Var x);
  Var relu(Var x);
  Var add(Var a, Var b);
  /// Concatenates rank-4 tensors along the channel axis.
  Var concat_channels(const std::vector<Var>& parts);
  /// x [B,C,H,W] + bias [B,C] broadcast over H and W.
  Var add_channel_bias(Var x, Var bias);
  /// v [B,C] -> [B,C,H,W] with every plane constant.
  Var broadcast_planes(Var v, int height, int width);
  /// Mean of squared differences over all elements; returns shape [1].
  Var mse_loss(Var pred, Var target);
  Var sum(Var x);

  void backward(Var scalar);

  /// Throw on non-finite op outputs (on by default in debug builds).
  void set_check_finite(bool on) { check_finite_ = on; }
  std::size_t node_count() const { return nodes_.size(); }

 private:
  struct Node {
    Tensor<T> value;
    Tensor<T> grad;
    bool requires_grad = false;
    std::function<void()> backward;
  };

  Var push(Tensor<T> value, bool requires_grad, std::function<void()> backward = {});
  Tensor<T>& grad_ref(std::size_t id);
  bool needs(Var v) const { return nodes_[v.id].requires_grad; }

  std::vector<Node> nodes_;
#ifdef NDEBUG
  bool check_finite_ = false;
#else
  bool check_finite_ = true;
#endif
};

/// Named parameters with Adam moments and a monotonic step counter.
template <typename T>
class ParamStore {
 public:
  struct Entry {
    std::string name;
    Tensor<T> value;
    Tensor<T> m;
    Tensor<T> v;
  };

  /// Registers a parameter; names must be unique. Returns its index.
  std::size_t add(const std::string& name, Tensor<T> value);

  const Tensor<T>& get(const std::string& name) const;
  Tensor<T>& get(const std::string& name);
  bool contains(const std::string& name) const { return index_.count(name) > 0; }

  const std::vector<Entry>& entries() const { return entries_; }
  std::vector<Entry>& entries() { return entries_; }
  std::size_t parameter_count() const;
  long step() const { return step_; }

  /// Flattened parameter values in registration order.
  std::vector<T> flatten() const;
  /// Inverse of flatten(); the length must match exactly.
  void unflatten(const std::vector<T>& flat);

  template <typename U>
  ParamStore<U> cast() const {
    ParamStore<U> out;
    for (const auto& e : entries_) out.add(e.name, e.value.template cast<U>());
    return out;
  }

 private:
  template <typename U>
  friend void adam_step(ParamStore<U>&, const std::map<std::string, Tensor<U>>&, double, double,
                        double, double);

  std::vector<Entry> entries_;
  std::map<std::string, std::size_t> index_;
  long step_ = 0;
};

/// Bias-corrected Adam update. Every parameter must have a gradient of the same shape.
template <typename T>
void adam_step(ParamStore<T>& store, const std::map<std::string, Tensor<T>>& grads, double lr,
               double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);

}  // namespace ssg::nn
