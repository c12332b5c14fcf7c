#include "sln/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <random>
#include <string>
#include <thread>

#include "sln/errors.hpp"
#include "sln/publisher.hpp"
#include "sln/rng.hpp"
#include "sln/tracer.hpp"

namespace sln {
namespace {

// Fixed-precision cell so identical runs serialize identically.
std::string csv_double(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", value);
    return buf;
}

std::uint64_t derive_seed(std::uint64_t seed, std::string_view label, std::uint64_t a,
                          std::uint64_t b = 0) {
    return combine(combine(combine(seed, fnv1a64(label)), a), b);
}

// Runs fn(0), ..., fn(count - 1) across a small thread pool. Every index
// must be independent of the others; results are collected by index, so
// scheduling order never shows in the output. The first exception thrown by
// any worker is rethrown on the calling thread once all workers stopped.
template <typename Fn>
void for_each_run(int count, Fn&& fn) {
    const unsigned hardware = std::thread::hardware_concurrency();
    const unsigned workers =
        std::min<unsigned>(count > 0 ? static_cast<unsigned>(count) : 0, hardware ? hardware : 1);
    if (workers <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::atomic<bool> stop{false};
    std::exception_ptr error;
    std::mutex error_mu;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (int i; (i = next.fetch_add(1)) < count && !stop.load();) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mu);
                    if (!error) error = std::current_exception();
                    stop.store(true);
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

} // namespace

GeneratedProcess generate_process(Ledger& ledger, int hops, std::uint64_t shortcut_seed) {
    if (hops < 0) fail(errc::invalid_argument, "hop count must be non-negative");
    GeneratedProcess process;
    process.root = "T";
    process.base = "d";
    ledger.ensure_account(process.root);
    for (int i = 0; i <= hops; ++i) {
        process.nodes.push_back("n" + std::to_string(i + 1));
        ledger.ensure_account(process.nodes.back());
    }

    LinkPublisher::Options options;
    options.shortcut_seed = shortcut_seed;
    LinkPublisher publisher(ledger, options);
    publisher.bootstrap_object(process.root, process.base, process.nodes.front());

    for (int i = 0; i < hops; ++i) {
        SemanticLink link;
        link.link_id = "l" + std::to_string(i + 1);
        link.link_type = "transport";
        link.source = process.nodes[i];
        link.target = process.nodes[i + 1];
        link.object = process.base;
        process.link_ids.push_back(link.link_id);
        publisher.publish_link(process.root, link, LinkState::Init);
        publisher.publish_link(process.root, link, LinkState::Transporting);
        publisher.publish_link(process.root, link, LinkState::Succeeded);
    }
    return process;
}

ShortcutDistributionResult run_shortcut_distribution(const SimConfig& config, std::ostream& csv) {
    if (config.shortcut_nodes < 2) fail(errc::invalid_argument, "path needs at least 2 nodes");
    const int hops = config.shortcut_nodes - 1;
    csv << "node_index,shortcut_count,seed\n";

    std::vector<std::vector<int>> run_counts(config.shortcut_runs);
    for_each_run(config.shortcut_runs, [&](int run) {
        Ledger ledger;
        ledger.set_key_seed(config.seed);
        const auto process =
            generate_process(ledger, hops, derive_seed(config.seed, "shortcut-dist", run));

        std::vector<int> counts(hops, 0);
        for (int i = 0; i < hops; ++i)
            for (const BlockchainTransaction* tx :
                 ledger.transactions_from_refs(process.nodes[i], process.base))
                counts[i] += tx->tag.kind == TxKind::Shortcut;
        run_counts[run] = std::move(counts);
    });

    ShortcutDistributionResult result;
    double first_sum = 0;
    for (int run = 0; run < config.shortcut_runs; ++run) {
        const std::vector<int>& counts = run_counts[run];
        for (int i = 0; i < hops; ++i) {
            csv << i << ',' << counts[i] << ',' << run << '\n';
            result.max_count = std::max(result.max_count, counts[i]);
        }
        first_sum += counts[0];
    }
    if (config.shortcut_runs > 0) result.first_node_mean = first_sum / config.shortcut_runs;
    return result;
}

std::vector<QueryStepsRow> run_query_steps(const SimConfig& config, std::ostream& csv) {
    if (config.case_min < 3 || config.case_max < config.case_min)
        fail(errc::invalid_argument, "case means must satisfy 3 <= min <= max");
    csv << "avg_length,steps_with,steps_without,ln_bound\n";

    std::vector<QueryStepsRow> rows;
    for (int mean_nodes = config.case_min; mean_nodes <= config.case_max; ++mean_nodes) {
        const RngStream lengths(config.seed, "steps-length", mean_nodes);
        double length_sum = 0, with_sum = 0, without_sum = 0;
        for (int path = 0; path < config.paths_per_case; ++path) {
            // Lengths are uniform over [mean-2, mean+2] nodes.
            const int nodes = mean_nodes - 2 + static_cast<int>(lengths.range(path, 0, 4));
            Ledger ledger;
            ledger.set_key_seed(config.seed);
            const auto process = generate_process(
                ledger, nodes - 1, derive_seed(config.seed, "steps", mean_nodes, path));

            TraceOptions with, without;
            without.use_shortcuts = false;
            length_sum += nodes;
            with_sum += query_path(ledger, process.root, process.base, with).visits;
            without_sum += query_path(ledger, process.root, process.base, without).visits;
        }
        QueryStepsRow row;
        row.avg_length = length_sum / config.paths_per_case;
        row.steps_with = with_sum / config.paths_per_case;
        row.steps_without = without_sum / config.paths_per_case;
        row.ln_bound = std::log(row.avg_length);
        rows.push_back(row);
        csv << csv_double(row.avg_length) << ',' << csv_double(row.steps_with) << ','
            << csv_double(row.steps_without) << ',' << csv_double(row.ln_bound) << '\n';
    }
    return rows;
}

std::vector<ReplicasRow> run_replicas(const SimConfig& config, std::ostream& csv) {
    for (const int length : config.replica_lengths)
        if (length < 1) fail(errc::invalid_argument, "path length must be positive");
    csv << "length,replicas,n_squared\n";

    const int per_length = config.replica_runs;
    const int total = static_cast<int>(config.replica_lengths.size()) * per_length;
    std::vector<ReplicasRow> rows(total);
    for_each_run(total, [&](int index) {
        const int length = config.replica_lengths[index / per_length];
        const int run = index % per_length;
        const int hops = length - 1;
        Ledger ledger;
        ledger.set_key_seed(config.seed);
        const auto process =
            generate_process(ledger, hops, derive_seed(config.seed, "replicas", length, run));

        // A node's ID is copied onto every ledger position from itself
        // through its farthest outgoing shortcut target, so it holds
        // 1 + (longest jump distance) replicas.
        long long replicas = 0;
        for (int i = 0; i <= hops; ++i) {
            std::size_t longest = 0;
            for (const BlockchainTransaction* tx :
                 ledger.transactions_from_refs(process.nodes[i], process.base)) {
                if (tx->tag.kind != TxKind::Shortcut) continue;
                longest = std::max(longest, tx->asset.path_size() - i);
            }
            replicas += 1 + static_cast<long long>(longest);
        }
        rows[index] = {length, replicas, static_cast<long long>(length) * length};
    });

    for (const ReplicasRow& row : rows)
        csv << row.length << ',' << row.replicas << ',' << row.n_squared << '\n';
    return rows;
}

std::vector<ConfirmationRow> run_confirmation(const SimConfig& config, std::ostream& csv) {
    csv << "strategy,rounds,terminal_phase,final_reliability\n";
    static const char* kStrategies[] = {"always-confirm", "dispute-then-resolve", "always-argue"};

    Ledger ledger;
    ledger.set_key_seed(config.seed);
    ConfirmationEngine engine(ledger, config.confirmation);

    std::vector<ConfirmationRow> rows;
    for (int k = 0; k < config.confirmation_sessions; ++k) {
        const std::string strategy = kStrategies[k % 3];
        const std::string u = "u" + std::to_string(k);
        const std::string v = "v" + std::to_string(k);
        const std::string link = "L" + std::to_string(k);

        engine.request_confirmation(link, u, v);
        if (strategy == "always-confirm") {
            engine.confirm(link);
        } else if (strategy == "dispute-then-resolve") {
            engine.dispute(link);
            engine.resolve(link, engine.session(link).next_responder);
        } else {
            engine.dispute(link);
            while (engine.can_argue(link))
                engine.argue(link, engine.session(link).next_responder);
            engine.exhaust(link);
        }

        const auto session = engine.session(link);
        ConfirmationRow row;
        row.strategy = strategy;
        row.rounds = session.rounds();
        row.terminal_phase = confirm_phase_name(session.phase);
        row.final_reliability = engine.reliability(session.confirmee);
        rows.push_back(row);
        csv << row.strategy << ',' << row.rounds << ',' << row.terminal_phase << ','
            << csv_double(row.final_reliability) << '\n';
    }
    return rows;
}

double theorem1_expectation(int n, double p) {
    if (n < 2) fail(errc::invalid_argument, "state count must be at least 2");
    if (!(p > 0.0 && p < 1.0)) fail(errc::invalid_argument, "probability must lie in (0, 1)");
    const double q = 1.0 - p;
    double sum = 0;
    for (int i = 1; i <= n - 1; ++i) {
        const double pi = std::pow(p, i);
        const double qi = std::pow(q, i);
        sum += pi + qi + (1.0 - pi - qi) * 2.0;
    }
    return sum / n;
}

double mc_host_accesses(std::uint64_t seed, std::size_t samples) {
    if (samples == 0) fail(errc::invalid_argument, "sample count must be positive");
    SemanticLink link;
    link.link_id = "l";
    link.link_type = "transport";
    link.source = "u";
    link.target = "v";
    link.object = "d";

    static const LinkState kPredecessors[] = {LinkState::Init, LinkState::Succeeded,
                                              LinkState::Failed};
    std::mt19937_64 gen(seed);
    std::uniform_int_distribution<int> pick_predecessor(0, 2);
    std::uniform_int_distribution<int> pick_batch(1, 4);
    std::uniform_int_distribution<std::size_t> pick_state(0, all_link_states.size() - 1);

    long long total_hosts = 0;
    for (std::size_t s = 0; s < samples; ++s) {
        // The host a query for End resolves to depends on what preceded it;
        // one predecessor is drawn per batch and shared by its End queries.
        const std::optional<ObjectLocation> prev =
            infer_object_location(link, kPredecessors[pick_predecessor(gen)]);
        const int batch = pick_batch(gen);
        bool on_source = false, on_target = false;
        for (int q = 0; q < batch; ++q) {
            const LinkState state = all_link_states[pick_state(gen)];
            const std::string host = host_mapping(link, infer_object_location(link, state), prev);
            (host == link.source ? on_source : on_target) = true;
        }
        total_hosts += (on_source ? 1 : 0) + (on_target ? 1 : 0);
    }
    return static_cast<double>(total_hosts) / static_cast<double>(samples);
}

} // namespace sln
