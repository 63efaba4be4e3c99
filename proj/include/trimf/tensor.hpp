// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <memory>
#include <string>
#include <vector>

#include "trimf/rng.hpp"

namespace trimf {

namespace detail {
struct TensorNode;
}

// Dense 2-D double tensor participating in a reverse-mode computation
// graph. Value-semantic handle; copies share the underlying node.
// Vectors are represented as 1xN or Nx1 tensors.
class Tensor {
public:
    Tensor() = default;

    static Tensor zeros(size_t rows, size_t cols, bool requires_grad = false);
    static Tensor full(size_t rows, size_t cols, double value,
                       bool requires_grad = false);
    static Tensor from(size_t rows, size_t cols, std::vector<double> values,
                       bool requires_grad = false);
    static Tensor row(std::vector<double> values, bool requires_grad = false);
    static Tensor randn(size_t rows, size_t cols, Rng& rng, double mean,
                        double stddev, bool requires_grad = false);

    bool defined() const { return node_ != nullptr; }
    size_t rows() const;
    size_t cols() const;
    size_t size() const { return rows() * cols(); }

    double at(size_t r, size_t c) const;
    double item() const;  // 1x1 only
    const std::vector<double>& values() const;
    std::vector<double>& mutable_values();  // leaf mutation (optimizer, memory writes)

    bool requires_grad() const;
    void set_requires_grad(bool rg);  // leaves only
    const std::vector<double>& grad() const;
    bool has_grad() const;
    void zero_grad();

    // Reverse pass from a scalar; accumulates into every reachable
    // requires_grad tensor's grad.
    void backward() const;

    detail::TensorNode* node() const { return node_.get(); }

    // internal: op constructors
    static Tensor wrap_(std::shared_ptr<detail::TensorNode> node);
    std::shared_ptr<detail::TensorNode> node_shared_() const { return node_; }

private:
    explicit Tensor(std::shared_ptr<detail::TensorNode> node)
        : node_(std::move(node)) {}
    std::shared_ptr<detail::TensorNode> node_;
};

namespace detail {
struct TensorNode {
    size_t rows = 0, cols = 0;
    std::vector<double> values;
    std::vector<double> grad;  // sized lazily
    bool requires_grad = false;
    bool is_leaf = true;
    const char* op_name = "leaf";
    std::vector<std::shared_ptr<TensorNode>> parents;
    std::function<void(TensorNode&)> backward_fn;

    void ensure_grad() {
        if (grad.size() != values.size()) grad.assign(values.size(), 0.0);
    }
};
}  // namespace detail

enum class ReduceKind { Max, Mean, Sum };

// --- ops ---
Tensor matmul(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& x);
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);  // elementwise
Tensor emax(const Tensor& a, const Tensor& b);  // elementwise max, ties to a
Tensor scale(const Tensor& x, double c);
Tensor add_rowvec(const Tensor& x, const Tensor& v);  // v is 1xN, broadcast over rows
Tensor softmax_rows(const Tensor& x);
Tensor sigmoid(const Tensor& x);
Tensor leaky_relu(const Tensor& x);  // negative slope 0.01
Tensor log_elem(const Tensor& x);
Tensor reduce(ReduceKind kind, const Tensor& x, int axis);  // axis 0 -> 1xN, axis 1 -> Mx1
Tensor sum_all(const Tensor& x);
Tensor slice_rows(const Tensor& x, size_t r0, size_t r1);
Tensor slice_cols(const Tensor& x, size_t c0, size_t c1);
Tensor concat_rows(const std::vector<Tensor>& parts);
Tensor concat_cols(const std::vector<Tensor>& parts);
Tensor gather_rows(const Tensor& x, const std::vector<size_t>& indices);
Tensor scale_rows(const Tensor& x, const Tensor& w);  // w is Mx1 or 1xM
Tensor dropout(const Tensor& x, double rate, Rng& rng, bool train_mode);
Tensor detach(const Tensor& x);

}  // namespace trimf
