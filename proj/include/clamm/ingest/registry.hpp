#pragma once

#include "clamm/ingest/event.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <map>
#include <string>

namespace clamm::ingest {

enum class RouterLabel { Interface, Aggregator, OtherRetail };

inline std::string_view to_string(RouterLabel l) {
  switch (l) {
    case RouterLabel::Interface: return "interface";
    case RouterLabel::Aggregator: return "aggregator";
    case RouterLabel::OtherRetail: return "other-retail";
  }
  return "?";
}

inline std::optional<RouterLabel> parse_router_label(std::string_view s) {
  if (s == "interface") return RouterLabel::Interface;
  if (s == "aggregator") return RouterLabel::Aggregator;
  if (s == "other-retail") return RouterLabel::OtherRetail;
  return std::nullopt;
}

struct RouterEntry {
  RouterLabel label{RouterLabel::Interface};
  std::string note;
};

/// Known retail entry points on one chain, keyed by lowercase address.
struct RouterRegistry {
  std::string chain;
  std::map<std::string, RouterEntry> entries;

  bool contains(std::string_view address) const { return entries.count(lower(address)) != 0; }

  void add(std::string_view address, RouterEntry entry, const std::string& source = "registry") {
    const auto norm = normalize_address(address);
    if (!norm) throw IngestError(source, 0, "invalid router address '" + std::string(address) + "'");
    if (!entries.emplace(*norm, std::move(entry)).second) {
      throw IngestError(source, 0, "duplicate router address " + *norm);
    }
  }
};

inline RouterRegistry parse_registry(const nlohmann::json& doc, const std::string& source = "registry") {
  RouterRegistry reg;
  try {
    reg.chain = doc.at("chain").get<std::string>();
    for (const auto& e : doc.at("entries")) {
      const std::string label_text = e.at("label").get<std::string>();
      const auto label = parse_router_label(label_text);
      if (!label) throw IngestError(source, 0, "unknown router label '" + label_text + "'");
      reg.add(e.at("address").get<std::string>(), RouterEntry{*label, e.value("note", std::string())}, source);
    }
  } catch (const nlohmann::json::exception& ex) {
    throw IngestError(source, 0, std::string("malformed registry: ") + ex.what());
  }
  if (reg.chain.empty()) throw IngestError(source, 0, "registry chain is empty");
  return reg;
}

inline RouterRegistry load_registry(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IngestError(path.string(), 0, "cannot open registry");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& ex) {
    throw IngestError(path.string(), 0, std::string("invalid JSON: ") + ex.what());
  }
  return parse_registry(doc, path.string());
}

inline nlohmann::json registry_json(const RouterRegistry& reg) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& [addr, e] : reg.entries) {
    entries.push_back({{"address", addr}, {"label", std::string(to_string(e.label))}, {"note", e.note}});
  }
  return {{"chain", reg.chain}, {"entries", entries}};
}

}  // namespace clamm::ingest
