// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "trimf/memory.hpp"

using namespace trimf;
using trimf::testing::max_rel_grad_error;
using trimf::testing::random_tensor;

namespace {

// brute-force normal read: softmax(q W s^T) s, one scalar at a time
Tensor oracle_read_normal(const Tensor& q, const Tensor& slots,
                          const Tensor& form) {
    size_t nq = q.rows(), nc = slots.rows(), hs = slots.cols();
    std::vector<double> out(nq * hs, 0.0);
    for (size_t i = 0; i < nq; ++i) {
        std::vector<double> score(nc, 0.0);
        for (size_t c = 0; c < nc; ++c)
            for (size_t a = 0; a < q.cols(); ++a)
                for (size_t b = 0; b < hs; ++b)
                    score[c] += q.at(i, a) * form.at(a, b) * slots.at(c, b);
        double mx = score[0];
        for (double s : score) mx = std::max(mx, s);
        double z = 0.0;
        for (double& s : score) {
            s = std::exp(s - mx);
            z += s;
        }
        for (size_t c = 0; c < nc; ++c)
            for (size_t b = 0; b < hs; ++b)
                out[i * hs + b] += score[c] / z * slots.at(c, b);
    }
    return Tensor::from(nq, hs, std::move(out));
}

std::vector<double> oracle_inverse_weights(const Tensor& seq,
                                           const Tensor& slots,
                                           const Tensor& form) {
    size_t m = seq.rows(), nc = slots.rows();
    std::vector<double> weights(m, 0.0);
    for (size_t c = 0; c < nc; ++c) {
        std::vector<double> score(m, 0.0);
        for (size_t j = 0; j < m; ++j)
            for (size_t a = 0; a < slots.cols(); ++a)
                for (size_t b = 0; b < seq.cols(); ++b)
                    score[j] += slots.at(c, a) * form.at(b, a) * seq.at(j, b);
        double mx = score[0];
        for (double s : score) mx = std::max(mx, s);
        double z = 0.0;
        for (double& s : score) {
            s = std::exp(s - mx);
            z += s;
        }
        for (size_t j = 0; j < m; ++j) weights[j] += score[j] / z;
    }
    return weights;
}

}  // namespace

TEST_CASE("memory init matches the configured distribution") {
    Memory m = init_memory(MemoryKind::Entity,
                           std::vector<std::string>(10, "t"), 1000, 7);
    double sum = 0.0, sq = 0.0;
    size_t n = m.slots.values().size();
    for (double v : m.slots.values()) {
        sum += v;
        sq += v * v;
    }
    double mean = sum / double(n);
    double std = std::sqrt(sq / double(n) - mean * mean);
    CHECK(std::fabs(mean) < 0.01);
    CHECK(std > 0.015);
    CHECK(std < 0.025);
    Memory m2 = init_memory(MemoryKind::Entity,
                            std::vector<std::string>(10, "t"), 1000, 7);
    CHECK(trimf::testing::max_abs_diff(m.slots, m2.slots) == 0.0);
}

TEST_CASE("read_normal single slot returns the slot") {
    Rng rng(1);
    Tensor slots = random_tensor(1, 4, rng, false);
    Tensor form = random_tensor(3, 4, rng, false);
    Tensor q = random_tensor(2, 3, rng, false);
    Tensor out = read_normal(q, slots, form);
    for (size_t i = 0; i < 2; ++i)
        for (size_t j = 0; j < 4; ++j)
            CHECK(out.at(i, j) == doctest::Approx(slots.at(0, j)).epsilon(1e-12));
}

TEST_CASE("read_normal with zero form is the slot column mean") {
    Rng rng(2);
    Tensor slots = random_tensor(3, 4, rng, false);
    Tensor form = Tensor::zeros(5, 4);
    Tensor q = random_tensor(2, 5, rng, false);
    Tensor out = read_normal(q, slots, form);
    for (size_t j = 0; j < 4; ++j) {
        double mean = (slots.at(0, j) + slots.at(1, j) + slots.at(2, j)) / 3.0;
        CHECK(out.at(0, j) == doctest::Approx(mean).epsilon(1e-12));
    }
}

TEST_CASE("read_normal matches the loop oracle") {
    Rng rng(3);
    for (int t = 0; t < 10; ++t) {
        Tensor slots = random_tensor(3, 5, rng, false);
        Tensor form = random_tensor(4, 5, rng, false);
        Tensor q = random_tensor(2, 4, rng, false);
        Tensor got = read_normal(q, slots, form);
        Tensor want = oracle_read_normal(q, slots, form);
        CHECK(trimf::testing::max_abs_diff(got, want) < 1e-10);
    }
}

TEST_CASE("read_normal attention rows sum to one") {
    Rng rng(4);
    Tensor slots = random_tensor(5, 6, rng, false);
    Tensor form = random_tensor(4, 6, rng, false);
    Tensor q = random_tensor(3, 4, rng, false);
    Tensor attn;
    read_normal(q, slots, form, &attn);
    for (size_t i = 0; i < attn.rows(); ++i) {
        double s = 0.0;
        for (size_t j = 0; j < attn.cols(); ++j) {
            CHECK(attn.at(i, j) >= 0.0);
            s += attn.at(i, j);
        }
        CHECK(s == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("read_inverse uniform case") {
    Rng rng(5);
    Tensor seq = random_tensor(4, 3, rng, false);
    Tensor slots = random_tensor(1, 6, rng, false);
    Tensor form = Tensor::zeros(3, 6);
    InverseRead out = read_inverse(seq, slots, form);
    for (size_t j = 0; j < 4; ++j)
        CHECK(out.weights.at(j, 0) == doctest::Approx(0.25).epsilon(1e-12));
    for (size_t j = 0; j < 4; ++j)
        for (size_t b = 0; b < 3; ++b)
            CHECK(out.scaled_seq.at(j, b) ==
                  doctest::Approx(seq.at(j, b) / 4.0).epsilon(1e-12));
}

TEST_CASE("read_inverse weights sum to the slot count") {
    Rng rng(6);
    for (int t = 0; t < 10; ++t) {
        Tensor seq = random_tensor(6, 4, rng, false);
        Tensor slots = random_tensor(4, 5, rng, false);
        Tensor form = random_tensor(4, 5, rng, false);
        InverseRead out = read_inverse(seq, slots, form);
        double s = 0.0;
        for (size_t j = 0; j < 6; ++j) {
            CHECK(out.weights.at(j, 0) >= 0.0);
            s += out.weights.at(j, 0);
        }
        CHECK(s == doctest::Approx(4.0).epsilon(1e-9));
    }
}

TEST_CASE("read_inverse matches the loop oracle") {
    Rng rng(7);
    for (int t = 0; t < 10; ++t) {
        Tensor seq = random_tensor(4, 3, rng, false);
        Tensor slots = random_tensor(2, 5, rng, false);
        Tensor form = random_tensor(3, 5, rng, false);
        InverseRead out = read_inverse(seq, slots, form);
        std::vector<double> want = oracle_inverse_weights(seq, slots, form);
        for (size_t j = 0; j < 4; ++j) {
            CHECK(std::fabs(out.weights.at(j, 0) - want[j]) < 1e-10);
            for (size_t b = 0; b < 3; ++b)
                CHECK(std::fabs(out.scaled_seq.at(j, b) -
                                want[j] * seq.at(j, b)) < 1e-10);
        }
    }
}

TEST_CASE("write with zero gradient is a no-op") {
    Rng rng(8);
    Memory m = init_memory(MemoryKind::Relation, {"a", "b"}, 4, 9);
    Tensor before = Tensor::from(2, 4, m.slots.values());
    Tensor form = random_tensor(3, 4, rng, false);
    memory_write(m, {1.0, -2.0, 0.5}, form, {0.0, 0.0}, 1e-2);
    CHECK(trimf::testing::max_abs_diff(m.slots, before) == 0.0);
}

TEST_CASE("write moves the slot along the projected instance") {
    // sigmoid-BCE score gradient with p=0.5, y=1 is -0.5
    Rng rng(9);
    Memory m = init_memory(MemoryKind::Relation, {"a"}, 4, 10);
    std::vector<double> before = m.slots.values();
    Tensor form = random_tensor(3, 4, rng, false);
    std::vector<double> inst{0.3, -1.0, 2.0};
    double lr = 0.01;
    memory_write(m, inst, form, {-0.5}, lr);
    for (size_t b = 0; b < 4; ++b) {
        double proj = 0.0;
        for (size_t a = 0; a < 3; ++a) proj += inst[a] * form.at(a, b);
        CHECK(m.slots.at(0, b) ==
              doctest::Approx(before[b] + 0.5 * lr * proj).epsilon(1e-12));
    }
}

TEST_CASE("true-class write increases the bilinear score") {
    Rng rng(10);
    for (int t = 0; t < 30; ++t) {
        Memory m = init_memory(MemoryKind::Entity, {"a", "b", "c"}, 5,
                               1000 + uint64_t(t));
        Tensor form = random_tensor(4, 5, rng, false);
        std::vector<double> inst(4);
        for (double& v : inst) v = rng.normal(0.0, 1.0);
        size_t true_class = rng.index(3);
        // simulate a softmax p with p_true < 1
        std::vector<double> grad(3, 0.2);
        grad[true_class] = -0.4;  // p_true - 1 with p_true = 0.6

        auto score = [&] {
            double s = 0.0;
            for (size_t a = 0; a < 4; ++a)
                for (size_t b = 0; b < 5; ++b)
                    s += inst[a] * form.at(a, b) * m.slots.at(true_class, b);
            return s;
        };
        double before = score();
        memory_write(m, inst, form, grad, 1e-3);
        CHECK(score() > before);
    }
}

TEST_CASE("reads pass finite-difference checks") {
    Rng rng(11);
    Tensor slots = random_tensor(3, 5, rng);
    Tensor form = random_tensor(4, 5, rng);
    Tensor q = random_tensor(2, 4, rng);
    auto loss_normal = [&] {
        return sum_all(mul(read_normal(q, slots, form),
                           read_normal(q, slots, form)));
    };
    CHECK(max_rel_grad_error(slots, loss_normal) < 1e-4);
    CHECK(max_rel_grad_error(form, loss_normal) < 1e-4);
    CHECK(max_rel_grad_error(q, loss_normal) < 1e-4);
    auto loss_inverse = [&] {
        InverseRead r = read_inverse(q, slots, form);
        return sum_all(mul(r.scaled_seq, r.scaled_seq));
    };
    CHECK(max_rel_grad_error(slots, loss_inverse) < 1e-4);
    CHECK(max_rel_grad_error(form, loss_inverse) < 1e-4);
    CHECK(max_rel_grad_error(q, loss_inverse) < 1e-4);
}
