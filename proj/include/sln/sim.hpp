#pragma once

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "sln/confirmation.hpp"
#include "sln/ledger.hpp"

namespace sln {

// Knobs for the metric experiments. Every experiment is a pure function of
// this struct: rerunning with the same values produces byte-identical CSV.
struct SimConfig {
    std::uint64_t seed = 1;

    // Shortcut-count distribution along one long path.
    int shortcut_nodes = 1000;   // nodes on the measured path
    int shortcut_runs = 1000;    // independently seeded repetitions

    // Query cost by path length: case means and paths sampled per case.
    int case_min = 5;
    int case_max = 40;
    int paths_per_case = 1000;

    // Node-ID replica growth.
    std::vector<int> replica_lengths = {100, 500, 1000};
    int replica_runs = 100;

    // Confirmation strategy mix.
    int confirmation_sessions = 100;
    ConfirmationParams confirmation{};
};

// A linear transport process published onto a ledger: the process root,
// then nodes[0] .. nodes[hops] chained by links link_ids[0] .. [hops-1],
// each link driven Init -> Transporting -> Succeeded.
struct GeneratedProcess {
    std::string root;
    std::string base;
    std::vector<std::string> nodes;
    std::vector<std::string> link_ids;
};

GeneratedProcess generate_process(Ledger& ledger, int hops, std::uint64_t shortcut_seed);

struct ShortcutDistributionResult {
    double first_node_mean = 0;   // mean shortcut count of the path's first node
    int max_count = 0;            // largest per-node count seen anywhere
};

struct QueryStepsRow {
    double avg_length = 0;       // mean sampled node count of the case
    double steps_with = 0;       // mean trace visits using shortcuts
    double steps_without = 0;    // mean trace visits walking hop by hop
    double ln_bound = 0;         // ln(avg_length) reference column
};

struct ReplicasRow {
    int length = 0;              // nodes on the path
    long long replicas = 0;      // sum over nodes of ID copies they hold
    long long n_squared = 0;
};

struct ConfirmationRow {
    std::string strategy;
    std::size_t rounds = 0;
    std::string terminal_phase;
    double final_reliability = 0;   // the confirmee's score when the session ends
};

// Each experiment streams its CSV (header + rows) and returns the same data
// aggregated for programmatic checks.
ShortcutDistributionResult run_shortcut_distribution(const SimConfig& config, std::ostream& csv);
std::vector<QueryStepsRow> run_query_steps(const SimConfig& config, std::ostream& csv);
std::vector<ReplicasRow> run_replicas(const SimConfig& config, std::ostream& csv);
std::vector<ConfirmationRow> run_confirmation(const SimConfig& config, std::ostream& csv);

// Expected distinct-host accesses per the closed-form reference expression:
// (1/n) * sum_{i=1..n-1} (p^i + (1-p)^i + (1 - p^i - (1-p)^i) * 2).
// Throws InvalidArgument unless n >= 2 and 0 < p < 1.
double theorem1_expectation(int n, double p);

// Monte-Carlo mean of distinct hosts touched when a uniformly sized batch
// of 1..4 uniform state queries is answered through the state-to-host
// mapping (End resolving to the host of a per-batch random predecessor).
double mc_host_accesses(std::uint64_t seed, std::size_t samples);

} // namespace sln
