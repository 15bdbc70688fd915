#include <catch2/catch.hpp>

#include <cmath>

#include "oracles.hpp"
#include "powalloc/named_pmf.hpp"
#include "powalloc/random_instance.hpp"
#include "powalloc/rng.hpp"
#include "powalloc/solver.hpp"

using namespace powalloc;

namespace {

// capacity 1, single channel with e/noise = 1, recharge of exactly 1 every
// slot, discount 1/2. Spending everything each slot keeps the battery at 1,
// so the fixed point is J(1) = log(2)/(1-lambda) = 2 log 2 and
// J(0) = lambda * J(1) = log 2.
ProblemSpec two_state_spec() {
    ProblemSpec spec;
    spec.battery_capacity = 1;
    spec.recharge_pmf = Pmf(std::vector<double>{0.0, 1.0});
    spec.channel_states = {1.0};
    spec.channel_pmf = Pmf(std::vector<double>{1.0});
    spec.noise = 1.0;
    spec.discount = 0.5;
    spec.validate();
    return spec;
}

} // namespace

TEST_CASE("first backup from zero is the greedy policy", "[solver]") {
    Rng rng(31);
    ProblemSpec spec = random_problem_spec(rng, InstanceBounds{8, 3, 6});
    BackupResult backup = bellman_backup(spec, make_value_table(spec));
    for (int e = 0; e < spec.num_energy_levels(); ++e)
        for (int h = 1; h <= spec.num_channels(); ++h) {
            CHECK(backup.values.at(e, h) == Approx(spec.reward(h, e)).margin(1e-15));
            // reward strictly increasing in power, so spend everything
            CHECK(backup.policy.at(e, h) == e);
        }
    CHECK(backup.values.at(0, 1) == 0.0);
    CHECK(backup.policy.at(0, 1) == 0);
}

TEST_CASE("backup agrees with the naive triple-sum oracle", "[solver][property]") {
    Rng rng(32);
    for (int trial = 0; trial < 20; ++trial) {
        ProblemSpec spec = random_problem_spec(rng, InstanceBounds{10, 4, 9});
        ValueTable j = make_value_table(spec);
        for (double& v : j.data()) v = rng.uniform(0.0, 10.0);
        BackupResult fast = bellman_backup(spec, j);
        ValueTable slow = testing::naive_backup(spec, j);
        CHECK(sup_norm_diff(fast.values, slow) <= 1e-11);
    }
}

TEST_CASE("backup rejects mismatched tables", "[solver]") {
    ProblemSpec spec = two_state_spec();
    CHECK_THROWS_AS(bellman_backup(spec, ValueTable(5, 2)), std::invalid_argument);
}

TEST_CASE("backup is a discount-factor contraction", "[solver][property]") {
    Rng rng(33);
    for (int trial = 0; trial < 20; ++trial) {
        ProblemSpec spec = random_problem_spec(rng, InstanceBounds{8, 3, 6});
        ValueTable a = make_value_table(spec);
        ValueTable b = make_value_table(spec);
        for (double& v : a.data()) v = rng.uniform(0.0, 20.0);
        for (double& v : b.data()) v = rng.uniform(0.0, 20.0);
        double before = sup_norm_diff(a, b);
        double after =
            sup_norm_diff(bellman_backup(spec, a).values, bellman_backup(spec, b).values);
        CHECK(after <= spec.discount * before + 1e-12);
    }
}

TEST_CASE("backup preserves pointwise dominance", "[solver][property]") {
    Rng rng(34);
    for (int trial = 0; trial < 20; ++trial) {
        ProblemSpec spec = random_problem_spec(rng, InstanceBounds{8, 3, 6});
        ValueTable lo = make_value_table(spec);
        ValueTable hi = make_value_table(spec);
        for (std::size_t i = 0; i < lo.data().size(); ++i) {
            lo.data()[i] = rng.uniform(0.0, 10.0);
            hi.data()[i] = lo.data()[i] + rng.uniform(0.0, 5.0);
        }
        ValueTable lo_next = bellman_backup(spec, lo).values;
        ValueTable hi_next = bellman_backup(spec, hi).values;
        for (std::size_t i = 0; i < lo_next.data().size(); ++i)
            CHECK(lo_next.data()[i] <= hi_next.data()[i] + 1e-12);
    }
}

TEST_CASE("value iteration reaches the closed-form fixed point", "[solver]") {
    ProblemSpec spec = two_state_spec();
    SolveResult solved = value_iteration(spec, 1e-8);
    REQUIRE(solved.diagnostics.converged);
    CHECK(solved.values.at(1, 1) == Approx(2.0 * std::log(2.0)).margin(1e-8));
    CHECK(solved.values.at(0, 1) == Approx(std::log(2.0)).margin(1e-8));
    CHECK(solved.policy.at(1, 1) == 1);
    CHECK(solved.policy.at(0, 1) == 0);
    CHECK(solved.diagnostics.error_bound ==
          Approx(spec.discount * solved.diagnostics.final_sup_norm_delta /
                 (1.0 - spec.discount)));
}

TEST_CASE("value iteration output is a near fixed point within its error bound",
          "[solver][property]") {
    Rng rng(35);
    for (int trial = 0; trial < 10; ++trial) {
        ProblemSpec spec = random_problem_spec(rng, InstanceBounds{10, 4, 8});
        const double epsilon = 1e-9;
        SolveResult solved = value_iteration(spec, epsilon);
        REQUIRE(solved.diagnostics.converged);
        double residual =
            sup_norm_diff(bellman_backup(spec, solved.values).values, solved.values);
        CHECK(residual <= 2.0 * epsilon * (1.0 - spec.discount));
        // geometric upper bound on every entry
        for (double v : solved.values.data()) {
            CHECK(v >= 0.0);
            CHECK(v <= spec.value_upper_bound() + 1e-9);
        }
    }
}

TEST_CASE("value iteration reports non-convergence instead of failing", "[solver]") {
    ProblemSpec spec = two_state_spec();
    SolveResult solved = value_iteration(spec, 1e-12, 3);
    CHECK_FALSE(solved.diagnostics.converged);
    CHECK(solved.diagnostics.iterations == 3);
    CHECK(solved.diagnostics.final_sup_norm_delta > 0.0);
}

TEST_CASE("policy evaluation", "[solver]") {
    ProblemSpec spec = two_state_spec();

    SECTION("zero policy earns nothing") {
        ValueTable v = evaluate_policy(spec, make_policy_table(spec));
        for (double x : v.data()) CHECK(x == Approx(0.0).margin(1e-12));
    }
    SECTION("infeasible policies are rejected") {
        PolicyTable bad = make_policy_table(spec);
        bad.at(0, 1) = 1;
        CHECK_THROWS_AS(evaluate_policy(spec, bad), std::invalid_argument);
    }
    SECTION("dense and iterative paths agree") {
        Rng rng(36);
        for (int trial = 0; trial < 5; ++trial) {
            ProblemSpec random_spec = random_problem_spec(rng, InstanceBounds{8, 3, 6});
            SolveResult solved = value_iteration(random_spec, 1e-9);
            ValueTable dense =
                evaluate_policy(random_spec, solved.policy, PolicyEvalMethod::dense);
            ValueTable iterative =
                evaluate_policy(random_spec, solved.policy, PolicyEvalMethod::iterative);
            CHECK(sup_norm_diff(dense, iterative) <= 1e-9);
        }
    }
}

TEST_CASE("policy evaluation is consistent with value iteration", "[solver][property]") {
    Rng rng(37);
    for (int trial = 0; trial < 10; ++trial) {
        ProblemSpec spec = random_problem_spec(rng, InstanceBounds{10, 4, 8});
        const double epsilon = 1e-9;
        SolveResult solved = value_iteration(spec, epsilon);
        ValueTable exact = evaluate_policy(spec, solved.policy);
        CHECK(sup_norm_diff(exact, solved.values) <= 10.0 * epsilon);

        // a feasible suboptimal policy never dominates the optimum
        PolicyTable half = make_policy_table(spec);
        for (int e = 0; e < spec.num_energy_levels(); ++e)
            for (int h = 1; h <= spec.num_channels(); ++h) half.at(e, h) = e / 2;
        ValueTable v_half = evaluate_policy(spec, half);
        for (int e = 0; e < spec.num_energy_levels(); ++e)
            for (int h = 1; h <= spec.num_channels(); ++h)
                CHECK(v_half.at(e, h) <= solved.values.at(e, h) + 1e-9);
    }
}

TEST_CASE("brute force enumerates exactly the feasible policies", "[solver]") {
    ProblemSpec spec;
    spec.battery_capacity = 2;
    spec.recharge_pmf = Pmf(std::vector<double>{0.5, 0.5});
    spec.channel_states = {1.0, 2.0};
    spec.channel_pmf = Pmf(std::vector<double>{0.5, 0.5});
    spec.noise = 1.0;
    spec.discount = 0.6;
    spec.validate();

    BruteForceResult brute = brute_force_optimal(spec);
    // (1 * 2 * 3)^2 action assignments
    CHECK(brute.policies_enumerated == 36);

    SolveResult solved = value_iteration(spec, 1e-10);
    CHECK(sup_norm_diff(brute.values, solved.values) <= 1e-7);
}

TEST_CASE("brute force refuses oversized instances with an estimate", "[solver]") {
    ProblemSpec spec;
    spec.battery_capacity = 30;
    spec.recharge_pmf = Pmf(std::vector<double>{0.5, 0.5});
    spec.channel_states = {1.0, 2.0};
    spec.channel_pmf = Pmf(std::vector<double>{0.5, 0.5});
    spec.noise = 1.0;
    spec.discount = 0.6;
    spec.validate();
    CHECK_THROWS_WITH(brute_force_optimal(spec), Catch::Contains("too large"));
}

TEST_CASE("degenerate zero-capacity instance solves to all zeros", "[solver]") {
    ProblemSpec spec;
    spec.battery_capacity = 0;
    spec.recharge_pmf = Pmf(std::vector<double>{0.25, 0.75});
    spec.channel_states = {1.0, 2.0};
    spec.channel_pmf = Pmf(std::vector<double>{0.5, 0.5});
    spec.noise = 1.0;
    spec.discount = 0.6;
    spec.validate();

    BruteForceResult brute = brute_force_optimal(spec);
    CHECK(brute.policies_enumerated == 1);
    SolveResult solved = value_iteration(spec, 1e-9);
    for (int h = 1; h <= 2; ++h) {
        CHECK(brute.values.at(0, h) == Approx(0.0).margin(1e-12));
        CHECK(solved.values.at(0, h) == Approx(0.0).margin(1e-12));
        CHECK(solved.policy.at(0, h) == 0);
        CHECK(brute.policy.at(0, h) == 0);
    }
}

TEST_CASE("value iteration matches brute force on random small instances",
          "[solver][property]") {
    Rng rng(38);
    for (int trial = 0; trial < 10; ++trial) {
        ProblemSpec spec = random_problem_spec(rng, InstanceBounds{3, 2, 4});
        SolveResult solved = value_iteration(spec, 1e-9);
        BruteForceResult brute = brute_force_optimal(spec);
        CHECK(sup_norm_diff(solved.values, brute.values) <= 1e-6);
        ValueTable vi_policy_value = evaluate_policy(spec, solved.policy);
        CHECK(sup_norm_diff(vi_policy_value, brute.values) <= 1e-6);
    }
}

TEST_CASE("the epsilon argument is a real sup-norm guarantee", "[solver][property]") {
    // at a coarse epsilon any slack in the stopping rule would show up
    // against the enumeration oracle
    Rng rng(40);
    for (int trial = 0; trial < 8; ++trial) {
        ProblemSpec spec = random_problem_spec(rng, InstanceBounds{3, 2, 4});
        const double epsilon = 1e-4;
        SolveResult solved = value_iteration(spec, epsilon);
        BruteForceResult brute = brute_force_optimal(spec);
        CHECK(sup_norm_diff(solved.values, brute.values) <= epsilon);
    }
}

TEST_CASE("policy evaluation switches to the iterative path on large state spaces",
          "[solver]") {
    ProblemSpec spec;
    spec.battery_capacity = 150;  // 151 x 15 = 2265 states, beyond the dense cutoff
    spec.recharge_pmf = decreasing_pmf(41);
    spec.channel_states.resize(15);
    for (int h = 1; h <= 15; ++h) spec.channel_states[h - 1] = static_cast<double>(h);
    spec.channel_pmf = bell_pmf(15);
    spec.noise = 10.0;
    spec.discount = 0.8;
    spec.validate();

    SolveResult solved = value_iteration(spec, 1e-9);
    REQUIRE(solved.diagnostics.converged);
    ValueTable automatic = evaluate_policy(spec, solved.policy);
    CHECK(sup_norm_diff(automatic, solved.values) <= 1e-8);
}

TEST_CASE("rescaling the reward rescales values and keeps the policy", "[solver][property]") {
    Rng rng(39);
    for (double scale : {0.5, 3.0}) {
        ProblemSpec spec = random_problem_spec(rng, InstanceBounds{8, 3, 6});
        ProblemSpec scaled = spec;
        double noise = spec.noise;
        scaled.reward_fn = [scale, noise](double channel, int power) {
            return scale * std::log1p(channel * power / noise);
        };
        SolveResult base = value_iteration(spec, 1e-10);
        SolveResult rescaled = value_iteration(scaled, 1e-10);
        for (std::size_t i = 0; i < base.values.data().size(); ++i)
            CHECK(rescaled.values.data()[i] ==
                  Approx(scale * base.values.data()[i]).margin(1e-7));
        CHECK(rescaled.policy == base.policy);
    }
}

TEST_CASE("action-value gaps flag only genuine near ties", "[solver]") {
    ProblemSpec spec = two_state_spec();
    SolveResult solved = value_iteration(spec, 1e-9);
    StateGrid<double> gaps = action_value_gaps(spec, solved.values);
    // single-action states are never flagged
    CHECK(std::isinf(gaps.at(0, 1)));
    // spending beats idling by a clear margin here
    CHECK(gaps.at(1, 1) > 0.1);
}
