#include "lfa/chain_io.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include <json.hpp>

namespace lfa::io {

std::string format_number(double value, int sig) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", sig, value);
  return buf;
}

namespace {

void append_escaped(std::string& out, const std::string& s) {
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
}

}  // namespace

std::string to_json(const markov::Chain& chain) {
  std::string out;
  out.reserve(64 + chain.edges.size() * 24);
  out += "{\n  \"num_states\": ";
  out += std::to_string(chain.num_states);
  out += ",\n  \"labels\": [";
  for (std::size_t i = 0; i < chain.labels.size(); ++i) {
    if (i) out += ", ";
    out.push_back('"');
    append_escaped(out, chain.labels[i]);
    out.push_back('"');
  }
  out += "],\n  \"transitions\": [\n";
  bool first = true;
  for (std::size_t i = 0; i < chain.num_states; ++i) {
    for (const markov::Edge& e : chain.row(i)) {
      if (!first) out += ",\n";
      first = false;
      out += "    [" + std::to_string(i) + ", " + std::to_string(e.to) + ", " +
             std::to_string(e.num) + ", " + std::to_string(e.den) + "]";
    }
  }
  out += "\n  ],\n  \"events\": [";
  first = true;
  for (std::size_t i = 0; i < chain.num_states; ++i) {
    for (const markov::Edge& e : chain.row(i)) {
      if (!e.event) continue;
      if (!first) out += ", ";
      first = false;
      out += "[" + std::to_string(i) + ", " + std::to_string(e.to) + "]";
    }
  }
  out += "]\n}\n";
  return out;
}

markov::Chain from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("chain JSON parse error: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("num_states") || !doc.contains("transitions"))
    throw std::invalid_argument("chain JSON needs num_states and transitions");

  std::size_t num_states = doc["num_states"].get<std::size_t>();
  if (num_states == 0) throw std::invalid_argument("chain JSON has zero states");

  std::vector<std::string> labels;
  if (doc.contains("labels") && !doc["labels"].empty()) {
    labels = doc["labels"].get<std::vector<std::string>>();
    if (labels.size() != num_states)
      throw std::invalid_argument("chain JSON label count does not match num_states");
  }

  std::vector<std::pair<std::uint32_t, markov::Edge>> edge_list;
  for (const nlohmann::json& row : doc["transitions"]) {
    if (!row.is_array() || row.size() != 4)
      throw std::invalid_argument("chain JSON transition must be [from, to, num, den]");
    std::uint64_t from = row[0].get<std::uint64_t>();
    std::uint64_t to = row[1].get<std::uint64_t>();
    std::int64_t num = row[2].get<std::int64_t>();
    std::int64_t den = row[3].get<std::int64_t>();
    if (from >= num_states || to >= num_states)
      throw std::invalid_argument("chain JSON transition endpoint out of range");
    if (den <= 0) throw std::invalid_argument("chain JSON denominator must be positive");
    if (num < 0) throw std::invalid_argument("chain JSON numerator must be non-negative");
    markov::Edge e;
    e.to = static_cast<std::uint32_t>(to);
    e.num = num;
    e.den = den;
    edge_list.emplace_back(static_cast<std::uint32_t>(from), e);
  }

  markov::Chain chain = markov::make_chain(num_states, std::move(edge_list), std::move(labels));
  if (doc.contains("events") && !doc["events"].empty()) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> events;
    for (const nlohmann::json& pair : doc["events"]) {
      if (!pair.is_array() || pair.size() != 2)
        throw std::invalid_argument("chain JSON event must be [from, to]");
      events.emplace_back(pair[0].get<std::uint32_t>(), pair[1].get<std::uint32_t>());
    }
    chain = markov::with_event_edges(chain, events);
  }
  return chain;
}

std::string to_dot(const markov::Chain& chain) {
  if (chain.num_states > 200)
    throw std::invalid_argument("refusing to render more than 200 states as DOT");
  std::string out = "digraph chain {\n  rankdir=LR;\n  node [shape=ellipse];\n";
  for (std::size_t i = 0; i < chain.num_states; ++i) {
    out += "  " + std::to_string(i) + " [label=\"";
    if (!chain.labels.empty())
      append_escaped(out, chain.labels[i]);
    else
      out += std::to_string(i);
    out += "\"];\n";
  }
  for (std::size_t i = 0; i < chain.num_states; ++i) {
    for (const markov::Edge& e : chain.row(i)) {
      out += "  " + std::to_string(i) + " -> " + std::to_string(e.to) + " [label=\"" +
             std::to_string(e.num) + "/" + std::to_string(e.den) + "\"";
      if (e.event) out += ", penwidth=2, color=firebrick";
      out += "];\n";
    }
  }
  out += "}\n";
  return out;
}

}  // namespace lfa::io
