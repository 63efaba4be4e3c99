// SPDX-License-Identifier: Apache-2.0

#include "trimf/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_set>

#include "trimf/errors.hpp"

namespace trimf {

using detail::TensorNode;

namespace {

std::string shape_str(const Tensor& t) {
    return std::to_string(t.rows()) + "x" + std::to_string(t.cols());
}

std::shared_ptr<TensorNode> make_leaf(size_t rows, size_t cols,
                                      std::vector<double> values,
                                      bool requires_grad) {
    if (values.size() != rows * cols)
        throw_contract("tensor value count does not match shape");
    auto n = std::make_shared<TensorNode>();
    n->rows = rows;
    n->cols = cols;
    n->values = std::move(values);
    n->requires_grad = requires_grad;
    return n;
}

constexpr double kLeakySlope = 0.01;

}  // namespace

Tensor Tensor::wrap_(std::shared_ptr<detail::TensorNode> node) {
    return Tensor(std::move(node));
}

// --- Tensor methods ---

Tensor Tensor::zeros(size_t rows, size_t cols, bool requires_grad) {
    return Tensor(make_leaf(rows, cols, std::vector<double>(rows * cols, 0.0),
                            requires_grad));
}

Tensor Tensor::full(size_t rows, size_t cols, double value, bool requires_grad) {
    return Tensor(make_leaf(rows, cols, std::vector<double>(rows * cols, value),
                            requires_grad));
}

Tensor Tensor::from(size_t rows, size_t cols, std::vector<double> values,
                    bool requires_grad) {
    return Tensor(make_leaf(rows, cols, std::move(values), requires_grad));
}

Tensor Tensor::row(std::vector<double> values, bool requires_grad) {
    size_t n = values.size();
    return Tensor(make_leaf(1, n, std::move(values), requires_grad));
}

Tensor Tensor::randn(size_t rows, size_t cols, Rng& rng, double mean,
                     double stddev, bool requires_grad) {
    std::vector<double> v(rows * cols);
    for (auto& x : v) x = rng.normal(mean, stddev);
    return Tensor(make_leaf(rows, cols, std::move(v), requires_grad));
}

size_t Tensor::rows() const { return node_ ? node_->rows : 0; }
size_t Tensor::cols() const { return node_ ? node_->cols : 0; }

double Tensor::at(size_t r, size_t c) const {
    return node_->values[r * node_->cols + c];
}

double Tensor::item() const {
    if (size() != 1) throw_contract("item() requires a 1x1 tensor");
    return node_->values[0];
}

const std::vector<double>& Tensor::values() const { return node_->values; }

std::vector<double>& Tensor::mutable_values() {
    if (!node_->is_leaf)
        throw_contract("only leaf tensors may be mutated in place");
    return node_->values;
}

bool Tensor::requires_grad() const { return node_ && node_->requires_grad; }

void Tensor::set_requires_grad(bool rg) {
    if (!node_->is_leaf)
        throw_contract("requires_grad may only be toggled on leaves");
    node_->requires_grad = rg;
}

const std::vector<double>& Tensor::grad() const {
    node_->ensure_grad();
    return node_->grad;
}

bool Tensor::has_grad() const {
    return node_ && node_->grad.size() == node_->values.size();
}

void Tensor::zero_grad() {
    if (node_) node_->grad.assign(node_->values.size(), 0.0);
}

void Tensor::backward() const {
    if (!node_) throw_contract("backward on undefined tensor");
    if (size() != 1) throw_contract("backward requires a scalar loss");
    // topological order via iterative DFS
    std::vector<TensorNode*> order;
    std::unordered_set<TensorNode*> visited;
    struct Frame {
        TensorNode* n;
        size_t next_parent;
    };
    std::vector<Frame> stack;
    if (node_->requires_grad) stack.push_back({node_.get(), 0});
    while (!stack.empty()) {
        Frame& f = stack.back();
        if (f.next_parent == 0 && visited.count(f.n)) {
            stack.pop_back();
            continue;
        }
        if (f.next_parent < f.n->parents.size()) {
            TensorNode* p = f.n->parents[f.next_parent++].get();
            if (p->requires_grad && !visited.count(p)) stack.push_back({p, 0});
        } else {
            visited.insert(f.n);
            order.push_back(f.n);
            stack.pop_back();
        }
    }
    node_->ensure_grad();
    node_->grad[0] += 1.0;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        TensorNode* n = *it;
        if (n->backward_fn && n->grad.size() == n->values.size())
            n->backward_fn(*n);
    }
}

// --- ops ---

namespace {

// Builds a non-leaf node. Parents are captured as owning pointers so the
// graph stays alive as long as the output does.
Tensor op_node(size_t rows, size_t cols, std::vector<double> values,
               const std::vector<Tensor>& parents,
               std::function<void(TensorNode&)> backward, const char* name) {
    auto n = std::make_shared<TensorNode>();
    n->rows = rows;
    n->cols = cols;
    n->values = std::move(values);
    n->is_leaf = false;
    n->op_name = name;
    bool rg = false;
    for (const auto& p : parents) {
        if (!p.defined()) throw_contract("undefined tensor operand");
        rg = rg || p.requires_grad();
    }
    n->requires_grad = rg;
    if (rg) {
        for (const auto& p : parents) n->parents.push_back(p.node_shared_());
        n->backward_fn = std::move(backward);
    }
    return Tensor::wrap_(std::move(n));
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
    if (a.cols() != b.rows())
        throw_dim("matmul shape mismatch: " + shape_str(a) + " * " + shape_str(b));
    size_t m = a.rows(), k = a.cols(), n = b.cols();
    std::vector<double> out(m * n, 0.0);
    const auto& av = a.values();
    const auto& bv = b.values();
    for (size_t i = 0; i < m; ++i)
        for (size_t p = 0; p < k; ++p) {
            double av_ip = av[i * k + p];
            if (av_ip == 0.0) continue;
            for (size_t j = 0; j < n; ++j)
                out[i * n + j] += av_ip * bv[p * n + j];
        }
    return op_node(
        m, n, std::move(out), {a, b},
        [m, k, n](TensorNode& self) {
            TensorNode* pa = self.parents[0].get();
            TensorNode* pb = self.parents[1].get();
            const auto& g = self.grad;
            if (pa->requires_grad) {
                pa->ensure_grad();
                // dA = dC * B^T
                for (size_t i = 0; i < m; ++i)
                    for (size_t p = 0; p < k; ++p) {
                        double s = 0.0;
                        for (size_t j = 0; j < n; ++j)
                            s += g[i * n + j] * pb->values[p * n + j];
                        pa->grad[i * k + p] += s;
                    }
            }
            if (pb->requires_grad) {
                pb->ensure_grad();
                // dB = A^T * dC
                for (size_t p = 0; p < k; ++p)
                    for (size_t j = 0; j < n; ++j) {
                        double s = 0.0;
                        for (size_t i = 0; i < m; ++i)
                            s += pa->values[i * k + p] * g[i * n + j];
                        pb->grad[p * n + j] += s;
                    }
            }
        },
        "matmul");
}

Tensor transpose(const Tensor& x) {
    size_t m = x.rows(), n = x.cols();
    std::vector<double> out(m * n);
    const auto& v = x.values();
    for (size_t i = 0; i < m; ++i)
        for (size_t j = 0; j < n; ++j) out[j * m + i] = v[i * n + j];
    return op_node(
        n, m, std::move(out), {x},
        [m, n](TensorNode& self) {
            TensorNode* p = self.parents[0].get();
            if (!p->requires_grad) return;
            p->ensure_grad();
            for (size_t i = 0; i < m; ++i)
                for (size_t j = 0; j < n; ++j)
                    p->grad[i * n + j] += self.grad[j * m + i];
        },
        "transpose");
}

namespace {

void check_same_shape(const Tensor& a, const Tensor& b, const char* op) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw_dim(std::string(op) + " shape mismatch: " + shape_str(a) + " vs " +
                  shape_str(b));
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
    check_same_shape(a, b, "add");
    std::vector<double> out(a.size());
    for (size_t i = 0; i < out.size(); ++i)
        out[i] = a.values()[i] + b.values()[i];
    return op_node(
        a.rows(), a.cols(), std::move(out), {a, b},
        [](TensorNode& self) {
            for (int k = 0; k < 2; ++k) {
                TensorNode* p = self.parents[k].get();
                if (!p->requires_grad) continue;
                p->ensure_grad();
                for (size_t i = 0; i < self.grad.size(); ++i)
                    p->grad[i] += self.grad[i];
            }
        },
        "add");
}

Tensor sub(const Tensor& a, const Tensor& b) {
    check_same_shape(a, b, "sub");
    std::vector<double> out(a.size());
    for (size_t i = 0; i < out.size(); ++i)
        out[i] = a.values()[i] - b.values()[i];
    return op_node(
        a.rows(), a.cols(), std::move(out), {a, b},
        [](TensorNode& self) {
            TensorNode* pa = self.parents[0].get();
            TensorNode* pb = self.parents[1].get();
            if (pa->requires_grad) {
                pa->ensure_grad();
                for (size_t i = 0; i < self.grad.size(); ++i)
                    pa->grad[i] += self.grad[i];
            }
            if (pb->requires_grad) {
                pb->ensure_grad();
                for (size_t i = 0; i < self.grad.size(); ++i)
                    pb->grad[i] -= self.grad[i];
            }
        },
        "sub");
}

Tensor mul(const Tensor& a, const Tensor& b) {
    check_same_shape(a, b, "mul");
    std::vector<double> out(a.size());
    for (size_t i = 0; i < out.size(); ++i)
        out[i] = a.values()[i] * b.values()[i];
    return op_node(
        a.rows(), a.cols(), std::move(out), {a, b},
        [](TensorNode& self) {
            TensorNode* pa = self.parents[0].get();
            TensorNode* pb = self.parents[1].get();
            if (pa->requires_grad) {
                pa->ensure_grad();
                for (size_t i = 0; i < self.grad.size(); ++i)
                    pa->grad[i] += self.grad[i] * pb->values[i];
            }
            if (pb->requires_grad) {
                pb->ensure_grad();
                for (size_t i = 0; i < self.grad.size(); ++i)
                    pb->grad[i] += self.grad[i] * pa->values[i];
            }
        },
        "mul");
}

Tensor emax(const Tensor& a, const Tensor& b) {
    check_same_shape(a, b, "emax");
    std::vector<double> out(a.size());
    auto pick_a = std::make_shared<std::vector<char>>(a.size());
    for (size_t i = 0; i < out.size(); ++i) {
        bool first = a.values()[i] >= b.values()[i];
        (*pick_a)[i] = first;
        out[i] = first ? a.values()[i] : b.values()[i];
    }
    return op_node(
        a.rows(), a.cols(), std::move(out), {a, b},
        [pick_a](TensorNode& self) {
            TensorNode* pa = self.parents[0].get();
            TensorNode* pb = self.parents[1].get();
            for (size_t i = 0; i < self.grad.size(); ++i) {
                TensorNode* p = (*pick_a)[i] ? pa : pb;
                if (!p->requires_grad) continue;
                p->ensure_grad();
                p->grad[i] += self.grad[i];
            }
        },
        "emax");
}

Tensor scale(const Tensor& x, double c) {
    std::vector<double> out(x.size());
    for (size_t i = 0; i < out.size(); ++i) out[i] = x.values()[i] * c;
    return op_node(
        x.rows(), x.cols(), std::move(out), {x},
        [c](TensorNode& self) {
            TensorNode* p = self.parents[0].get();
            if (!p->requires_grad) return;
            p->ensure_grad();
            for (size_t i = 0; i < self.grad.size(); ++i)
                p->grad[i] += self.grad[i] * c;
        },
        "scale");
}

Tensor add_rowvec(const Tensor& x, const Tensor& v) {
    if (v.rows() != 1 || v.cols() != x.cols())
        throw_dim("add_rowvec shape mismatch: " + shape_str(x) + " + " +
                  shape_str(v));
    size_t m = x.rows(), n = x.cols();
    std::vector<double> out(m * n);
    for (size_t i = 0; i < m; ++i)
        for (size_t j = 0; j < n; ++j)
            out[i * n + j] = x.values()[i * n + j] + v.values()[j];
    return op_node(
        m, n, std::move(out), {x, v},
        [m, n](TensorNode& self) {
            TensorNode* px = self.parents[0].get();
            TensorNode* pv = self.parents[1].get();
            if (px->requires_grad) {
                px->ensure_grad();
                for (size_t i = 0; i < self.grad.size(); ++i)
                    px->grad[i] += self.grad[i];
            }
            if (pv->requires_grad) {
                pv->ensure_grad();
                for (size_t i = 0; i < m; ++i)
                    for (size_t j = 0; j < n; ++j)
                        pv->grad[j] += self.grad[i * n + j];
            }
        },
        "add_rowvec");
}

Tensor softmax_rows(const Tensor& x) {
    size_t m = x.rows(), n = x.cols();
    if (n == 0) throw_contract("softmax_rows on empty rows");
    std::vector<double> out(m * n);
    const auto& v = x.values();
    for (size_t i = 0; i < m; ++i) {
        double mx = -std::numeric_limits<double>::infinity();
        for (size_t j = 0; j < n; ++j) mx = std::max(mx, v[i * n + j]);
        double z = 0.0;
        for (size_t j = 0; j < n; ++j) {
            out[i * n + j] = std::exp(v[i * n + j] - mx);
            z += out[i * n + j];
        }
        for (size_t j = 0; j < n; ++j) out[i * n + j] /= z;
    }
    return op_node(
        m, n, std::move(out), {x},
        [m, n](TensorNode& self) {
            TensorNode* p = self.parents[0].get();
            if (!p->requires_grad) return;
            p->ensure_grad();
            for (size_t i = 0; i < m; ++i) {
                double dot = 0.0;
                for (size_t j = 0; j < n; ++j)
                    dot += self.grad[i * n + j] * self.values[i * n + j];
                for (size_t j = 0; j < n; ++j)
                    p->grad[i * n + j] += self.values[i * n + j] *
                                          (self.grad[i * n + j] - dot);
            }
        },
        "softmax_rows");
}

Tensor sigmoid(const Tensor& x) {
    std::vector<double> out(x.size());
    for (size_t i = 0; i < out.size(); ++i)
        out[i] = 1.0 / (1.0 + std::exp(-x.values()[i]));
    return op_node(
        x.rows(), x.cols(), std::move(out), {x},
        [](TensorNode& self) {
            TensorNode* p = self.parents[0].get();
            if (!p->requires_grad) return;
            p->ensure_grad();
            for (size_t i = 0; i < self.grad.size(); ++i) {
                double y = self.values[i];
                p->grad[i] += self.grad[i] * y * (1.0 - y);
            }
        },
        "sigmoid");
}

Tensor leaky_relu(const Tensor& x) {
    std::vector<double> out(x.size());
    for (size_t i = 0; i < out.size(); ++i) {
        double v = x.values()[i];
        out[i] = v >= 0.0 ? v : kLeakySlope * v;
    }
    return op_node(
        x.rows(), x.cols(), std::move(out), {x},
        [](TensorNode& self) {
            TensorNode* p = self.parents[0].get();
            if (!p->requires_grad) return;
            p->ensure_grad();
            for (size_t i = 0; i < self.grad.size(); ++i)
                p->grad[i] += self.grad[i] *
                              (p->values[i] >= 0.0 ? 1.0 : kLeakySlope);
        },
        "leaky_relu");
}

Tensor log_elem(const Tensor& x) {
    std::vector<double> out(x.size());
    for (size_t i = 0; i < out.size(); ++i) out[i] = std::log(x.values()[i]);
    return op_node(
        x.rows(), x.cols(), std::move(out), {x},
        [](TensorNode& self) {
            TensorNode* p = self.parents[0].get();
            if (!p->requires_grad) return;
            p->ensure_grad();
            for (size_t i = 0; i < self.grad.size(); ++i)
                p->grad[i] += self.grad[i] / p->values[i];
        },
        "log");
}

Tensor reduce(ReduceKind kind, const Tensor& x, int axis) {
    if (axis != 0 && axis != 1) throw_contract("reduce axis must be 0 or 1");
    size_t m = x.rows(), n = x.cols();
    size_t reduced = axis == 0 ? m : n;
    size_t kept = axis == 0 ? n : m;
    if (reduced == 0) throw_contract("reduce over an empty axis");
    const auto& v = x.values();
    auto get = [&](size_t r, size_t i) {
        return axis == 0 ? v[i * n + r] : v[r * n + i];
    };
    std::vector<double> out(kept);
    auto argmax = std::make_shared<std::vector<size_t>>();
    if (kind == ReduceKind::Max) argmax->resize(kept);
    for (size_t r = 0; r < kept; ++r) {
        if (kind == ReduceKind::Max) {
            size_t best = 0;
            double bv = get(r, 0);
            for (size_t i = 1; i < reduced; ++i)
                if (get(r, i) > bv) {
                    bv = get(r, i);
                    best = i;
                }
            out[r] = bv;
            (*argmax)[r] = best;
        } else {
            double s = 0.0;
            for (size_t i = 0; i < reduced; ++i) s += get(r, i);
            out[r] = kind == ReduceKind::Sum ? s : s / double(reduced);
        }
    }
    size_t or_ = axis == 0 ? 1 : m;
    size_t oc = axis == 0 ? n : 1;
    return op_node(
        or_, oc, std::move(out), {x},
        [kind, axis, m, n, reduced, kept, argmax](TensorNode& self) {
            TensorNode* p = self.parents[0].get();
            if (!p->requires_grad) return;
            p->ensure_grad();
            auto pidx = [&](size_t r, size_t i) {
                return axis == 0 ? i * n + r : r * n + i;
            };
            for (size_t r = 0; r < kept; ++r) {
                double g = self.grad[r];
                switch (kind) {
                    case ReduceKind::Max:
                        p->grad[pidx(r, (*argmax)[r])] += g;
                        break;
                    case ReduceKind::Sum:
                        for (size_t i = 0; i < reduced; ++i)
                            p->grad[pidx(r, i)] += g;
                        break;
                    case ReduceKind::Mean:
                        for (size_t i = 0; i < reduced; ++i)
                            p->grad[pidx(r, i)] += g / double(reduced);
                        break;
                }
            }
        },
        "reduce");
}

Tensor sum_all(const Tensor& x) {
    double s = 0.0;
    for (double v : x.values()) s += v;
    return op_node(
        1, 1, {s}, {x},
        [](TensorNode& self) {
            TensorNode* p = self.parents[0].get();
            if (!p->requires_grad) return;
            p->ensure_grad();
            for (size_t i = 0; i < p->grad.size(); ++i)
                p->grad[i] += self.grad[0];
        },
        "sum_all");
}

Tensor slice_rows(const Tensor& x, size_t r0, size_t r1) {
    if (r0 >= r1 || r1 > x.rows())
        throw_contract("slice_rows range [" + std::to_string(r0) + "," +
                       std::to_string(r1) + ") out of bounds for " +
                       std::to_string(x.rows()) + " rows");
    size_t n = x.cols(), m = r1 - r0;
    std::vector<double> out(x.values().begin() + r0 * n,
                            x.values().begin() + r1 * n);
    return op_node(
        m, n, std::move(out), {x},
        [r0, m, n](TensorNode& self) {
            TensorNode* p = self.parents[0].get();
            if (!p->requires_grad) return;
            p->ensure_grad();
            for (size_t i = 0; i < m * n; ++i)
                p->grad[r0 * n + i] += self.grad[i];
        },
        "slice_rows");
}

Tensor slice_cols(const Tensor& x, size_t c0, size_t c1) {
    if (c0 >= c1 || c1 > x.cols()) throw_contract("slice_cols out of bounds");
    size_t m = x.rows(), n = x.cols(), w = c1 - c0;
    std::vector<double> out(m * w);
    for (size_t i = 0; i < m; ++i)
        for (size_t j = 0; j < w; ++j)
            out[i * w + j] = x.values()[i * n + c0 + j];
    return op_node(
        m, w, std::move(out), {x},
        [c0, m, n, w](TensorNode& self) {
            TensorNode* p = self.parents[0].get();
            if (!p->requires_grad) return;
            p->ensure_grad();
            for (size_t i = 0; i < m; ++i)
                for (size_t j = 0; j < w; ++j)
                    p->grad[i * n + c0 + j] += self.grad[i * w + j];
        },
        "slice_cols");
}

Tensor concat_rows(const std::vector<Tensor>& parts) {
    if (parts.empty()) throw_contract("concat_rows of nothing");
    size_t n = parts[0].cols(), m = 0;
    for (const auto& p : parts) {
        if (p.cols() != n) throw_dim("concat_rows column mismatch");
        m += p.rows();
    }
    std::vector<double> out;
    out.reserve(m * n);
    for (const auto& p : parts)
        out.insert(out.end(), p.values().begin(), p.values().end());
    return op_node(
        m, n, std::move(out), parts,
        [](TensorNode& self) {
            size_t off = 0;
            for (auto& pp : self.parents) {
                TensorNode* p = pp.get();
                size_t cnt = p->values.size();
                if (p->requires_grad) {
                    p->ensure_grad();
                    for (size_t i = 0; i < cnt; ++i)
                        p->grad[i] += self.grad[off + i];
                }
                off += cnt;
            }
        },
        "concat_rows");
}

Tensor concat_cols(const std::vector<Tensor>& parts) {
    if (parts.empty()) throw_contract("concat_cols of nothing");
    size_t m = parts[0].rows(), n = 0;
    for (const auto& p : parts) {
        if (p.rows() != m) throw_dim("concat_cols row mismatch");
        n += p.cols();
    }
    std::vector<double> out(m * n);
    size_t off = 0;
    for (const auto& p : parts) {
        size_t w = p.cols();
        for (size_t i = 0; i < m; ++i)
            for (size_t j = 0; j < w; ++j)
                out[i * n + off + j] = p.values()[i * w + j];
        off += w;
    }
    return op_node(
        m, n, std::move(out), parts,
        [m, n](TensorNode& self) {
            size_t off = 0;
            for (auto& pp : self.parents) {
                TensorNode* p = pp.get();
                size_t w = p->cols;
                if (p->requires_grad) {
                    p->ensure_grad();
                    for (size_t i = 0; i < m; ++i)
                        for (size_t j = 0; j < w; ++j)
                            p->grad[i * w + j] += self.grad[i * n + off + j];
                }
                off += w;
            }
        },
        "concat_cols");
}

Tensor gather_rows(const Tensor& x, const std::vector<size_t>& indices) {
    size_t n = x.cols();
    for (size_t idx : indices)
        if (idx >= x.rows())
            throw_contract("gather_rows index " + std::to_string(idx) +
                           " out of range for " + std::to_string(x.rows()) +
                           " rows");
    std::vector<double> out(indices.size() * n);
    for (size_t i = 0; i < indices.size(); ++i)
        std::copy(x.values().begin() + indices[i] * n,
                  x.values().begin() + (indices[i] + 1) * n,
                  out.begin() + i * n);
    auto idxs = std::make_shared<std::vector<size_t>>(indices);
    return op_node(
        indices.size(), n, std::move(out), {x},
        [idxs, n](TensorNode& self) {
            TensorNode* p = self.parents[0].get();
            if (!p->requires_grad) return;
            p->ensure_grad();
            for (size_t i = 0; i < idxs->size(); ++i)
                for (size_t j = 0; j < n; ++j)
                    p->grad[(*idxs)[i] * n + j] += self.grad[i * n + j];
        },
        "gather_rows");
}

Tensor scale_rows(const Tensor& x, const Tensor& w) {
    size_t m = x.rows(), n = x.cols();
    if (w.size() != m)
        throw_dim("scale_rows weight length " + std::to_string(w.size()) +
                  " != row count " + std::to_string(m));
    std::vector<double> out(m * n);
    for (size_t i = 0; i < m; ++i)
        for (size_t j = 0; j < n; ++j)
            out[i * n + j] = x.values()[i * n + j] * w.values()[i];
    return op_node(
        m, n, std::move(out), {x, w},
        [m, n](TensorNode& self) {
            TensorNode* px = self.parents[0].get();
            TensorNode* pw = self.parents[1].get();
            if (px->requires_grad) {
                px->ensure_grad();
                for (size_t i = 0; i < m; ++i)
                    for (size_t j = 0; j < n; ++j)
                        px->grad[i * n + j] +=
                            self.grad[i * n + j] * pw->values[i];
            }
            if (pw->requires_grad) {
                pw->ensure_grad();
                for (size_t i = 0; i < m; ++i) {
                    double s = 0.0;
                    for (size_t j = 0; j < n; ++j)
                        s += self.grad[i * n + j] * px->values[i * n + j];
                    pw->grad[i] += s;
                }
            }
        },
        "scale_rows");
}

Tensor dropout(const Tensor& x, double rate, Rng& rng, bool train_mode) {
    if (!train_mode || rate <= 0.0) return x;
    if (rate >= 1.0) throw_contract("dropout rate must be < 1");
    double keep = 1.0 - rate;
    auto mask = std::make_shared<std::vector<double>>(x.size());
    std::vector<double> out(x.size());
    for (size_t i = 0; i < out.size(); ++i) {
        (*mask)[i] = rng.uniform() < rate ? 0.0 : 1.0 / keep;
        out[i] = x.values()[i] * (*mask)[i];
    }
    return op_node(
        x.rows(), x.cols(), std::move(out), {x},
        [mask](TensorNode& self) {
            TensorNode* p = self.parents[0].get();
            if (!p->requires_grad) return;
            p->ensure_grad();
            for (size_t i = 0; i < self.grad.size(); ++i)
                p->grad[i] += self.grad[i] * (*mask)[i];
        },
        "dropout");
}

Tensor detach(const Tensor& x) {
    return Tensor::from(x.rows(), x.cols(), x.values(), false);
}

}  // namespace trimf
