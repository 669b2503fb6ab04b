/*
 * Copyright 2026 the appealscope authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef APPEALSCOPE_NETGRAPH_HPP_
#define APPEALSCOPE_NETGRAPH_HPP_

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "appealscope/corpus.hpp"

namespace appealscope {

enum class EdgeKind { retweet, mention };

std::string_view to_string(EdgeKind k);

struct CommEdge {
  std::string source;
  std::string target;
  EdgeKind kind = EdgeKind::retweet;

  friend auto operator<=>(const CommEdge&, const CommEdge&) = default;
};

struct DegreeEntry {
  long long in = 0;
  long long out = 0;
  long long total() const { return in + out; }
};

// Per-period directed interaction multigraph. Nodes are the users who
// authored at least one in-period tweet; parallel edges are retained, so
// degrees count interactions, not unique neighbours. Immutable once built.
struct CommNetwork {
  std::string period_label;
  std::vector<std::string> nodes;  // sorted lexicographically
  std::vector<CommEdge> edges;     // sorted (source, target, kind), duplicates kept
  std::unordered_map<std::string, DegreeEntry> degrees;
  std::unordered_map<std::string, double> mean_retweet_count;  // over authored tweets
  std::unordered_map<std::string, bool> is_bot;  // export attribute; false if unknown
  std::size_t dropped_external_targets = 0;  // edge target never tweeted in-period
  std::size_t dropped_self_loops = 0;
};

// Builds the network for one period. Every tweet must fall inside the
// period (std::invalid_argument otherwise). Retweets contribute one
// author->source edge plus any mention edges; edges whose target is not a
// node are dropped and counted, as are self-loops.
CommNetwork build_network(std::span<const Tweet> tweets, const Period& period,
                          const std::unordered_map<std::string, bool>* bot_flags = nullptr);

// One network per configured period, in period order. Out-of-window
// tweets are skipped. Periods build independently; `threads` caps the
// worker count.
std::vector<CommNetwork> build_all_networks(
    const Corpus& corpus,
    const std::unordered_map<std::string, bool>* bot_flags = nullptr,
    unsigned threads = 1);

// In-count plus out-count with parallel-edge multiplicity. Throws
// std::out_of_range for a user that is not a node.
long long total_degree(const CommNetwork& network, const std::string& user_id);

enum class GraphFormat { dot, gexf };

// Deterministic export: nodes in lexicographic order with is_bot (0/1),
// mean_retweet_count and total_degree attributes, then directed edges.
void export_network(const CommNetwork& network, GraphFormat format, std::ostream& out);
std::string export_network(const CommNetwork& network, GraphFormat format);

}  // namespace appealscope

#endif  // APPEALSCOPE_NETGRAPH_HPP_
