// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "helpers.hpp"
#include "trimf/errors.hpp"
#include "trimf/optim.hpp"

using namespace trimf;

namespace {
Parameter make_param(double value, double grad) {
    Parameter p{"p", "test", Tensor::from(1, 1, {value}, true)};
    Tensor loss = scale(p.tensor, grad);
    loss.backward();
    return p;
}
}  // namespace

TEST_CASE("adam first step closed form") {
    // m_hat = g, v_hat = g^2 on step 1, so the update is lr*g/(|g|+eps)
    Parameter p = make_param(1.0, 0.5);
    Adam adam;
    adam.step({&p}, 0.1);
    CHECK(p.tensor.item() == doctest::Approx(0.9).epsilon(1e-6));
}

TEST_CASE("zero grad leaves the parameter unchanged") {
    Parameter p = make_param(2.5, 0.0);
    Adam adam;
    adam.step({&p}, 0.1);
    CHECK(p.tensor.item() == 2.5);
}

TEST_CASE("lr zero leaves params unchanged over repeated steps") {
    Parameter p = make_param(1.5, 0.7);
    Adam adam;
    adam.step({&p}, 0.0);
    scale(p.tensor, 0.7).backward();
    adam.step({&p}, 0.0);
    CHECK(p.tensor.item() == 1.5);
}

TEST_CASE("adam step is bitwise deterministic") {
    auto run = [] {
        Parameter p = make_param(1.0, 0.3);
        Adam adam;
        adam.step({&p}, 0.01);
        scale(p.tensor, -0.2).backward();
        adam.step({&p}, 0.02);
        return p.tensor.item();
    };
    CHECK(run() == run());
}

TEST_CASE("adam requires grads") {
    Parameter p{"p", "test", Tensor::from(1, 1, {1.0}, true)};
    Adam adam;
    CHECK_THROWS_AS(adam.step({&p}, 0.1), Error);
}

TEST_CASE("adam zeroes grads after stepping") {
    Parameter p = make_param(1.0, 0.5);
    Adam adam;
    adam.step({&p}, 0.1);
    CHECK(p.tensor.grad()[0] == 0.0);
}

TEST_CASE("lr schedule endpoints and ramp") {
    CHECK(scheduled_lr(0, 10, 100, 5e-5) == 0.0);
    CHECK(scheduled_lr(10, 10, 100, 5e-5) == doctest::Approx(5e-5));
    CHECK(scheduled_lr(100, 10, 100, 5e-5) == 0.0);
    CHECK(scheduled_lr(5, 10, 100, 5e-5) == doctest::Approx(2.5e-5));
    CHECK(scheduled_lr(55, 10, 100, 5e-5) == doctest::Approx(2.5e-5));
}

TEST_CASE("lr schedule clamps out-of-range steps") {
    CHECK(scheduled_lr(-5, 10, 100, 1.0) == 0.0);
    CHECK(scheduled_lr(1000, 10, 100, 1.0) == 0.0);
}

TEST_CASE("lr schedule validates warmup split") {
    CHECK_THROWS_AS(scheduled_lr(0, 0, 100, 1.0), Error);
    CHECK_THROWS_AS(scheduled_lr(0, 100, 100, 1.0), Error);
}
