#include "aocsi/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "aocsi/csv.hpp"

namespace aocsi {

namespace {

constexpr double kTieTolerance = 1e-12;
constexpr long kAbsorptionIterCap = 1000000;

// Fixed priority on exact reward ties: favors throughput, then fresher CSI.
constexpr std::array<ActionKind, kNumActions> kTieBreakOrder = {
    ActionKind::Transmit, ActionKind::Probe, ActionKind::Idle};

} // namespace

TruncatedMdp::TruncatedMdp(const StepMatrixCache& cache, const RewardParams& params,
                           int delta_max)
    : model_(cache.model()), params_(params), delta_max_(delta_max) {
    if (delta_max < 2) {
        throw DeltaMaxTooSmall("delta_max must be at least 2, got " +
                               std::to_string(delta_max));
    }
    params_.validate();

    const int m = num_channel_states();
    const int n = num_states();

    r_hat_.resize(n);
    mse_.resize(n);
    for (int z = 0; z < n; ++z) {
        const AgedObservation obs = state_at(z);
        r_hat_[z] = aocsi::expected_reliability(cache, obs);
        mse_[z] = aocsi::reliability_mse(cache, obs);
    }

    for (int ai = 0; ai < kNumActions; ++ai) {
        kernel_[ai].resize(n);
        rewards_[ai].resize(n);
    }
    for (int z = 0; z < n; ++z) {
        const AgedObservation obs = state_at(z);

        // Idle / Transmit: the belief ages deterministically, saturating
        // at delta_max.
        const int aged = index_of({std::min(obs.age + 1, delta_max_), obs.last_state});
        kernel_[static_cast<int>(ActionKind::Idle)][z] = {{aged, 1.0}};
        kernel_[static_cast<int>(ActionKind::Transmit)][z] = {{aged, 1.0}};

        // Probe: next belief is (1, s[t]) with s[t] distributed as the
        // age-step state distribution.
        const std::vector<double> p = cache.power_row(
            static_cast<std::size_t>(obs.age), static_cast<std::size_t>(obs.last_state));
        std::vector<Transition>& probe = kernel_[static_cast<int>(ActionKind::Probe)][z];
        probe.reserve(m);
        for (int sigma = 0; sigma < m; ++sigma) {
            if (p[sigma] > 0.0) probe.push_back({index_of({1, sigma}), p[sigma]});
        }

        const double uncertainty = -params_.beta * mse_[z];
        rewards_[static_cast<int>(ActionKind::Idle)][z] = uncertainty;
        rewards_[static_cast<int>(ActionKind::Probe)][z] = -params_.beta * params_.eps_c;
        rewards_[static_cast<int>(ActionKind::Transmit)][z] =
            transmit_reward(params_, r_hat_[z]) + uncertainty;
    }
}

TruncatedMdp build_mdp(const StepMatrixCache& cache, const RewardParams& params,
                       int delta_max) {
    return TruncatedMdp(cache, params, delta_max);
}

const char* policy_kind_name(PolicyKind kind) {
    switch (kind) {
        case PolicyKind::Optimal: return "optimal";
        case PolicyKind::Greedy: return "greedy";
        case PolicyKind::Randomized: return "randomized";
    }
    return "?";
}

std::array<double, kNumActions> Policy::probs(int state) const {
    if (deterministic()) {
        std::array<double, kNumActions> p{};
        p[static_cast<int>(actions[state])] = 1.0;
        return p;
    }
    return action_probs[state];
}

namespace {

// One Bellman sweep: v[z] = max_a { R(z, a) + sum_z' Pr[z'|z, a] w[z'] }.
// States are independent within a sweep, so the loop parallelizes; each
// state's arithmetic is sequential, making serial and parallel sweeps
// bit-identical.
void bellman_sweep(const TruncatedMdp& mdp, const std::vector<double>& w,
                   std::vector<double>& v, std::vector<ActionKind>* argmax,
                   bool parallel) {
    const int n = mdp.num_states();
#pragma omp parallel for if (parallel) schedule(static)
    for (int z = 0; z < n; ++z) {
        double best = -std::numeric_limits<double>::infinity();
        ActionKind best_action = kTieBreakOrder[0];
        for (ActionKind a : kTieBreakOrder) {
            double q = mdp.reward(z, a);
            for (const Transition& t : mdp.transitions(z, a)) {
                q += t.prob * w[t.next];
            }
            if (q > best + kTieTolerance) {
                best = q;
                best_action = a;
            }
        }
        v[z] = best;
        if (argmax) (*argmax)[z] = best_action;
    }
}

} // namespace

SolveReport solve_rvi(const TruncatedMdp& mdp, const SolverConfig& config) {
    const int n = mdp.num_states();
    const int ref = mdp.index_of(config.ref_state);

    std::vector<double> w(n, 0.0), v(n, 0.0), w_next(n, 0.0);
    SolveReport report;
    report.final_residual = std::numeric_limits<double>::infinity();

    long iterations = 0;
    while (iterations < config.max_iterations) {
        bellman_sweep(mdp, w, v, nullptr, config.parallel);
        ++iterations;

        const double v_ref = v[ref];
        double residual = 0.0;
        for (int z = 0; z < n; ++z) {
            double next = v[z] - v_ref;
            if (config.damping > 0.0) {
                next = config.damping * w[z] + (1.0 - config.damping) * next;
            }
            residual = std::max(residual, std::abs(next - w[z]));
            w_next[z] = next;
        }
        w.swap(w_next);

        report.gain = v_ref;
        report.final_residual = residual;
        if (residual < config.theta) {
            report.converged = true;
            break;
        }
    }
    report.iterations = iterations;

    std::vector<ActionKind> actions(n);
    bellman_sweep(mdp, w, v, &actions, config.parallel);

    report.policy.kind = PolicyKind::Optimal;
    report.policy.actions = std::move(actions);
    report.policy.metadata = PolicyMetadata{report.gain, report.iterations,
                                            config.theta, mdp.delta_max(), 0};
    return report;
}

Policy greedy_policy(const TruncatedMdp& mdp) {
    const int n = mdp.num_states();
    Policy policy;
    policy.kind = PolicyKind::Greedy;
    policy.actions.resize(n);
    for (int z = 0; z < n; ++z) {
        double best = -std::numeric_limits<double>::infinity();
        ActionKind best_action = kTieBreakOrder[0];
        for (ActionKind a : kTieBreakOrder) {
            const double r = mdp.reward(z, a);
            if (r > best + kTieTolerance) {
                best = r;
                best_action = a;
            }
        }
        policy.actions[z] = best_action;
    }
    return policy;
}

Policy randomized_policy(const TruncatedMdp& mdp) {
    Policy policy;
    policy.kind = PolicyKind::Randomized;
    policy.action_probs.assign(mdp.num_states(),
                               {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
    return policy;
}

namespace {

struct InducedChain {
    int n;
    std::vector<std::vector<Transition>> rows; // sparse kernel
    std::vector<double> reward;                // expected per-slot reward
};

InducedChain induce(const TruncatedMdp& mdp, const Policy& policy) {
    const int n = mdp.num_states();
    const std::size_t table =
        policy.deterministic() ? policy.actions.size() : policy.action_probs.size();
    if (static_cast<int>(table) != n) {
        throw PolicyStateMissing("policy covers " + std::to_string(table) +
                                 " states, MDP has " + std::to_string(n));
    }

    InducedChain chain;
    chain.n = n;
    chain.rows.resize(n);
    chain.reward.resize(n);
    for (int z = 0; z < n; ++z) {
        const std::array<double, kNumActions> p = policy.probs(z);
        std::vector<double> dense(n, 0.0);
        double r = 0.0;
        for (int ai = 0; ai < kNumActions; ++ai) {
            if (p[ai] == 0.0) continue;
            const ActionKind a = static_cast<ActionKind>(ai);
            r += p[ai] * mdp.reward(z, a);
            for (const Transition& t : mdp.transitions(z, a)) {
                dense[t.next] += p[ai] * t.prob;
            }
        }
        chain.reward[z] = r;
        for (int j = 0; j < n; ++j) {
            if (dense[j] > 0.0) chain.rows[z].push_back({j, dense[j]});
        }
    }
    return chain;
}

// Kosaraju strongly connected components, iterative.
std::vector<int> scc_components(const InducedChain& chain, int& num_components) {
    const int n = chain.n;
    std::vector<std::vector<int>> rev(n);
    for (int z = 0; z < n; ++z) {
        for (const Transition& t : chain.rows[z]) rev[t.next].push_back(z);
    }

    std::vector<int> order;
    order.reserve(n);
    std::vector<char> seen(n, 0);
    for (int start = 0; start < n; ++start) {
        if (seen[start]) continue;
        std::vector<std::pair<int, std::size_t>> stack{{start, 0}};
        seen[start] = 1;
        while (!stack.empty()) {
            auto& [z, edge] = stack.back();
            if (edge < chain.rows[z].size()) {
                const int next = chain.rows[z][edge++].next;
                if (!seen[next]) {
                    seen[next] = 1;
                    stack.push_back({next, 0});
                }
            } else {
                order.push_back(z);
                stack.pop_back();
            }
        }
    }

    std::vector<int> component(n, -1);
    num_components = 0;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        if (component[*it] != -1) continue;
        std::vector<int> stack{*it};
        component[*it] = num_components;
        while (!stack.empty()) {
            const int z = stack.back();
            stack.pop_back();
            for (int prev : rev[z]) {
                if (component[prev] == -1) {
                    component[prev] = num_components;
                    stack.push_back(prev);
                }
            }
        }
        ++num_components;
    }
    return component;
}

// Stationary distribution of a closed class, by Gaussian elimination on
// pi (Q - I) = 0 with the normalization sum(pi) = 1 replacing one
// equation. Handles periodic classes, which power iteration would not.
std::vector<double> class_stationary(const InducedChain& chain,
                                     const std::vector<int>& members) {
    const int k = static_cast<int>(members.size());
    std::vector<int> local(chain.n, -1);
    for (int i = 0; i < k; ++i) local[members[i]] = i;

    // Columns of (Q^T - I), last row replaced by the normalization.
    std::vector<std::vector<double>> a(k, std::vector<double>(k + 1, 0.0));
    for (int i = 0; i < k; ++i) {
        for (const Transition& t : chain.rows[members[i]]) {
            const int j = local[t.next];
            a[j][i] += t.prob;
        }
        a[i][i] -= 1.0;
    }
    for (int j = 0; j < k; ++j) a[k - 1][j] = 1.0;
    a[k - 1][k] = 1.0;

    for (int col = 0; col < k; ++col) {
        int pivot = col;
        for (int r = col + 1; r < k; ++r) {
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        }
        std::swap(a[col], a[pivot]);
        if (std::abs(a[col][col]) < 1e-14) {
            throw NoStationary("singular system while solving a closed class");
        }
        for (int r = 0; r < k; ++r) {
            if (r == col) continue;
            const double f = a[r][col] / a[col][col];
            if (f == 0.0) continue;
            for (int c = col; c <= k; ++c) a[r][c] -= f * a[col][c];
        }
    }
    std::vector<double> pi(k);
    for (int i = 0; i < k; ++i) pi[i] = a[i][k] / a[i][i];
    return pi;
}

} // namespace

double evaluate_policy_exact(const TruncatedMdp& mdp, const Policy& policy) {
    const InducedChain chain = induce(mdp, policy);
    const int n = chain.n;

    int num_components = 0;
    const std::vector<int> component = scc_components(chain, num_components);

    // A class is closed when no edge leaves it; those carry the long-run
    // behavior.
    std::vector<char> closed(num_components, 1);
    for (int z = 0; z < n; ++z) {
        for (const Transition& t : chain.rows[z]) {
            if (component[t.next] != component[z]) closed[component[z]] = 0;
        }
    }

    // Gain of each closed class under its stationary distribution.
    std::vector<double> class_gain(num_components, 0.0);
    std::vector<std::vector<int>> members(num_components);
    for (int z = 0; z < n; ++z) members[component[z]].push_back(z);
    int num_closed = 0;
    for (int c = 0; c < num_components; ++c) {
        if (!closed[c]) continue;
        ++num_closed;
        const std::vector<double> pi = class_stationary(chain, members[c]);
        double g = 0.0;
        for (std::size_t i = 0; i < members[c].size(); ++i) {
            g += pi[i] * chain.reward[members[c][i]];
        }
        class_gain[c] = g;
    }

    // Start distribution: post-probe belief (1, sigma) with sigma drawn
    // from the physical chain's stationary distribution.
    const std::vector<double> phys = steady_state(mdp.model());
    std::vector<double> start(n, 0.0);
    for (int sigma = 0; sigma < mdp.num_channel_states(); ++sigma) {
        start[mdp.index_of({1, sigma})] = phys[sigma];
    }

    if (num_closed == 1) {
        // Unichain: start-independent gain.
        for (int c = 0; c < num_components; ++c) {
            if (closed[c]) return class_gain[c];
        }
    }

    // Several closed classes: average their gains under the absorption
    // probabilities from the start distribution. h_c solves h = Q h with
    // h = 1 on class c; the iteration contracts on the transient part.
    double gain = 0.0;
    for (int c = 0; c < num_components; ++c) {
        if (!closed[c]) continue;
        std::vector<double> h(n, 0.0), h_next(n);
        for (int z : members[c]) h[z] = 1.0;
        bool converged = false;
        for (long it = 0; it < kAbsorptionIterCap; ++it) {
            double diff = 0.0;
            for (int z = 0; z < n; ++z) {
                double acc = 0.0;
                for (const Transition& t : chain.rows[z]) acc += t.prob * h[t.next];
                h_next[z] = acc;
                diff = std::max(diff, std::abs(acc - h[z]));
            }
            h.swap(h_next);
            if (diff < 1e-13) {
                converged = true;
                break;
            }
        }
        if (!converged) {
            throw NoStationary("absorption probabilities did not converge");
        }
        double absorb = 0.0;
        for (int z = 0; z < n; ++z) absorb += start[z] * h[z];
        gain += absorb * class_gain[c];
    }
    return gain;
}

namespace {

// Rank of an action in the canonical tie-break order (0 = most preferred).
int tie_rank(ActionKind a) {
    for (int i = 0; i < kNumActions; ++i) {
        if (kTieBreakOrder[i] == a) return i;
    }
    return kNumActions;
}

// True when `a` precedes `b`: statewise tie-break order, then
// lexicographic over the state enumeration.
bool policy_precedes(const std::vector<ActionKind>& a, const std::vector<ActionKind>& b) {
    for (std::size_t z = 0; z < a.size(); ++z) {
        const int ra = tie_rank(a[z]), rb = tie_rank(b[z]);
        if (ra != rb) return ra < rb;
    }
    return false;
}

} // namespace

BruteForceResult brute_force_optimal(const TruncatedMdp& mdp, long guard) {
    const int n = mdp.num_states();
    double count = 1.0;
    for (int z = 0; z < n; ++z) count *= 3.0;
    if (count > static_cast<double>(guard)) {
        throw InstanceTooLarge("3^" + std::to_string(n) +
                               " policies exceed the enumeration guard of " +
                               std::to_string(guard));
    }
    const long total = static_cast<long>(count);

    BruteForceResult best;
    best.gain = -std::numeric_limits<double>::infinity();

#pragma omp parallel
    {
        BruteForceResult local;
        local.gain = -std::numeric_limits<double>::infinity();
        Policy candidate;
        candidate.kind = PolicyKind::Optimal;
        candidate.actions.resize(n);

#pragma omp for schedule(static)
        for (long code = 0; code < total; ++code) {
            long rest = code;
            for (int z = 0; z < n; ++z) {
                candidate.actions[z] = static_cast<ActionKind>(rest % 3);
                rest /= 3;
            }
            const double gain = evaluate_policy_exact(mdp, candidate);
            if (gain > local.gain + kTieTolerance ||
                (gain > local.gain - kTieTolerance &&
                 (local.policy.actions.empty() ||
                  policy_precedes(candidate.actions, local.policy.actions)))) {
                local.gain = gain;
                local.policy = candidate;
            }
        }

#pragma omp critical
        {
            if (local.gain > best.gain + kTieTolerance ||
                (local.gain > best.gain - kTieTolerance &&
                 (best.policy.actions.empty() ||
                  policy_precedes(local.policy.actions, best.policy.actions)))) {
                best = local;
            }
        }
    }
    return best;
}

ThresholdSummary threshold_summary(const Policy& policy, const TruncatedMdp& mdp) {
    if (!policy.deterministic()) {
        throw std::invalid_argument("threshold_summary needs a deterministic policy");
    }
    ThresholdSummary summary;
    for (int sigma = 0; sigma < mdp.num_channel_states(); ++sigma) {
        ThresholdRecord record;
        record.last_state = sigma;
        record.first_probe_age = -1;
        record.actions.reserve(mdp.delta_max());
        bool probes_from_threshold_on = true;
        for (int age = 1; age <= mdp.delta_max(); ++age) {
            const ActionKind a = policy.actions[mdp.index_of({age, sigma})];
            record.actions.push_back(action_letter(a));
            if (a == ActionKind::Probe && record.first_probe_age < 0) {
                record.first_probe_age = age;
            }
            if (record.first_probe_age >= 0 && a != ActionKind::Probe) {
                probes_from_threshold_on = false;
            }
        }
        record.threshold_type = record.first_probe_age >= 0 && probes_from_threshold_on;
        summary.per_state.push_back(std::move(record));
    }
    return summary;
}

void write_policy_csv(const Policy& policy, const TruncatedMdp& mdp, std::ostream& out) {
    if (policy.deterministic()) {
        out << "delta,last_state,action\n";
        for (int z = 0; z < mdp.num_states(); ++z) {
            const AgedObservation obs = mdp.state_at(z);
            out << obs.age << ',' << obs.last_state << ','
                << action_letter(policy.actions[z]) << '\n';
        }
    } else {
        out << "delta,last_state,p_idle,p_probe,p_transmit\n";
        for (int z = 0; z < mdp.num_states(); ++z) {
            const AgedObservation obs = mdp.state_at(z);
            const auto p = policy.action_probs[z];
            out << obs.age << ',' << obs.last_state << ',' << format_double(p[0])
                << ',' << format_double(p[1]) << ',' << format_double(p[2]) << '\n';
        }
    }
}

} // namespace aocsi
