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

#include "appealscope/netgraph.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "appealscope/parallel.hpp"

namespace appealscope {

std::string_view to_string(EdgeKind k) {
  return k == EdgeKind::retweet ? "retweet" : "mention";
}

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string xml_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string dot_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

void export_dot(const CommNetwork& net, std::ostream& out) {
  out << "digraph comm_network {\n";
  for (const std::string& node : net.nodes) {
    const DegreeEntry& d = net.degrees.at(node);
    auto bot_it = net.is_bot.find(node);
    int bot = (bot_it != net.is_bot.end() && bot_it->second) ? 1 : 0;
    out << "  \"" << dot_escape(node) << "\" [is_bot=" << bot
        << ", mean_retweet_count=" << fmt_double(net.mean_retweet_count.at(node))
        << ", total_degree=" << d.total() << "];\n";
  }
  for (const CommEdge& e : net.edges)
    out << "  \"" << dot_escape(e.source) << "\" -> \"" << dot_escape(e.target)
        << "\" [kind=\"" << to_string(e.kind) << "\"];\n";
  out << "}\n";
}

void export_gexf(const CommNetwork& net, std::ostream& out) {
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<gexf xmlns=\"http://gexf.net/1.3\" version=\"1.3\">\n"
      << "  <graph defaultedgetype=\"directed\" mode=\"static\">\n"
      << "    <attributes class=\"node\">\n"
      << "      <attribute id=\"0\" title=\"is_bot\" type=\"integer\"/>\n"
      << "      <attribute id=\"1\" title=\"mean_retweet_count\" type=\"double\"/>\n"
      << "      <attribute id=\"2\" title=\"total_degree\" type=\"integer\"/>\n"
      << "    </attributes>\n"
      << "    <attributes class=\"edge\">\n"
      << "      <attribute id=\"3\" title=\"kind\" type=\"string\"/>\n"
      << "    </attributes>\n"
      << "    <nodes>\n";
  for (const std::string& node : net.nodes) {
    const DegreeEntry& d = net.degrees.at(node);
    auto bot_it = net.is_bot.find(node);
    int bot = (bot_it != net.is_bot.end() && bot_it->second) ? 1 : 0;
    std::string id = xml_escape(node);
    out << "      <node id=\"" << id << "\" label=\"" << id << "\">\n"
        << "        <attvalues>\n"
        << "          <attvalue for=\"0\" value=\"" << bot << "\"/>\n"
        << "          <attvalue for=\"1\" value=\""
        << fmt_double(net.mean_retweet_count.at(node)) << "\"/>\n"
        << "          <attvalue for=\"2\" value=\"" << d.total() << "\"/>\n"
        << "        </attvalues>\n"
        << "      </node>\n";
  }
  out << "    </nodes>\n    <edges>\n";
  std::size_t edge_id = 0;
  for (const CommEdge& e : net.edges) {
    out << "      <edge id=\"" << edge_id++ << "\" source=\"" << xml_escape(e.source)
        << "\" target=\"" << xml_escape(e.target) << "\">\n"
        << "        <attvalues>\n"
        << "          <attvalue for=\"3\" value=\"" << to_string(e.kind) << "\"/>\n"
        << "        </attvalues>\n"
        << "      </edge>\n";
  }
  out << "    </edges>\n  </graph>\n</gexf>\n";
}

}  // namespace

CommNetwork build_network(std::span<const Tweet> tweets, const Period& period,
                          const std::unordered_map<std::string, bool>* bot_flags) {
  CommNetwork net;
  net.period_label = period.label;

  for (const Tweet& t : tweets) {
    UtcDate d = date_of(t.created_at);
    if (d < period.start || d > period.end)
      throw std::invalid_argument("tweet '" + t.tweet_id + "' is outside period '" +
                                  period.label + "'");
  }

  // Nodes: distinct in-period authors, plus their mean engagement.
  std::unordered_map<std::string, std::pair<long long, long long>> authored;  // sum, count
  for (const Tweet& t : tweets) {
    auto& [sum, count] = authored[t.author_id];
    sum += t.retweet_count;
    ++count;
  }
  net.nodes.reserve(authored.size());
  for (const auto& [id, agg] : authored) {
    net.nodes.push_back(id);
    net.degrees.emplace(id, DegreeEntry{});
    net.mean_retweet_count.emplace(
        id, static_cast<double>(agg.first) / static_cast<double>(agg.second));
  }
  std::sort(net.nodes.begin(), net.nodes.end());

  auto add_edge = [&](const std::string& source, const std::string& target, EdgeKind kind) {
    if (source == target) {
      ++net.dropped_self_loops;
      return;
    }
    if (!net.degrees.contains(target)) {
      ++net.dropped_external_targets;
      return;
    }
    net.edges.push_back({source, target, kind});
    ++net.degrees[source].out;
    ++net.degrees[target].in;
  };

  for (const Tweet& t : tweets) {
    if (t.is_retweet && t.retweeted_author_id)
      add_edge(t.author_id, *t.retweeted_author_id, EdgeKind::retweet);
    for (const std::string& mentioned : t.mentioned_author_ids)
      add_edge(t.author_id, mentioned, EdgeKind::mention);
  }
  std::sort(net.edges.begin(), net.edges.end());

  if (bot_flags) {
    for (const std::string& node : net.nodes) {
      auto it = bot_flags->find(node);
      net.is_bot.emplace(node, it != bot_flags->end() && it->second);
    }
  }
  return net;
}

std::vector<CommNetwork> build_all_networks(
    const Corpus& corpus, const std::unordered_map<std::string, bool>* bot_flags,
    unsigned threads) {
  const auto& periods = corpus.periods.periods();
  std::vector<std::vector<Tweet>> buckets(periods.size());
  for (const Tweet& t : corpus.tweets) {
    auto idx = corpus.periods.index_of(t.created_at);
    if (idx) buckets[*idx].push_back(t);
  }
  std::vector<CommNetwork> networks(periods.size());
  parallel_for_chunks(periods.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i)
      networks[i] = build_network(buckets[i], periods[i], bot_flags);
  });
  return networks;
}

long long total_degree(const CommNetwork& network, const std::string& user_id) {
  auto it = network.degrees.find(user_id);
  if (it == network.degrees.end())
    throw std::out_of_range("user '" + user_id + "' is not a node in period '" +
                            network.period_label + "'");
  return it->second.total();
}

void export_network(const CommNetwork& network, GraphFormat format, std::ostream& out) {
  if (format == GraphFormat::dot)
    export_dot(network, out);
  else
    export_gexf(network, out);
}

std::string export_network(const CommNetwork& network, GraphFormat format) {
  std::ostringstream out;
  export_network(network, format, out);
  return out.str();
}

}  // namespace appealscope
