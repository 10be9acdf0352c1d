#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dmsim/entities.hpp"
#include "dmsim/sensing.hpp"
#include "dmsim/validation.hpp"

namespace dmsim {

/// Global knobs read from the optional [sim] section.
struct SimParams {
  double default_horizon = 3600.0;
  double mobility_tick = 1.0;
  std::int64_t reading_bytes = 64;
  double link_efficiency = 1.0;
  double wireless_latency = 0.5;   // direct SDCC to DPC hop
  double inter_dpc_latency = 1.0;  // replica propagation between peers
  double dpc_cdc_latency = 1.0;
  double cdc_dcc_latency = 1.0;
  int sms_batch_size = 10000;
  double merge_lookback = 600.0;
  bool escalate_unmatched = false;
  double false_value_max = 100.0;
};

struct Scenario {
  std::string name;
  std::string source_path;
  Topology topology;
  SimParams params;
  std::vector<HazardEvent> hazards;
};

struct ParseError : std::runtime_error {
  ParseError(const std::string& file, int line, const std::string& what)
      : std::runtime_error(file + ":" + std::to_string(line) + ": " + what), line_number(line) {}
  int line_number;
};

namespace detail {

inline std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

/// Splits on `sep` into at most `max_parts` pieces; the final piece keeps
/// any further separators (descriptions may contain them).
inline std::vector<std::string> split_limit(const std::string& s, char sep, std::size_t max_parts) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (out.size() + 1 < max_parts) {
    auto pos = s.find(sep, start);
    if (pos == std::string::npos) break;
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
  out.push_back(s.substr(start));
  return out;
}

}  // namespace detail

namespace parse_detail {

struct Cursor {
  std::string file;
  int line = 0;
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(file, line, msg); }
};

inline double number(const Cursor& at, const std::string& key, const std::string& raw) {
  const std::string v = detail::trim(raw);
  if (v.empty()) at.fail("empty value for '" + key + "'");
  try {
    std::size_t idx = 0;
    const double d = std::stod(v, &idx);
    if (idx != v.size()) at.fail("trailing characters in number for '" + key + "': " + raw);
    return d;
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception&) {
    at.fail("not a number for '" + key + "': " + raw);
  }
}

inline long long integer(const Cursor& at, const std::string& key, const std::string& raw) {
  const std::string v = detail::trim(raw);
  if (v.empty()) at.fail("empty value for '" + key + "'");
  try {
    std::size_t idx = 0;
    const long long n = std::stoll(v, &idx);
    if (idx != v.size()) at.fail("trailing characters in integer for '" + key + "': " + raw);
    return n;
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception&) {
    at.fail("not an integer for '" + key + "': " + raw);
  }
}

inline bool boolean(const Cursor& at, const std::string& key, const std::string& raw) {
  const std::string v = detail::lower(detail::trim(raw));
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  at.fail("not a boolean for '" + key + "': " + raw);
}

inline std::vector<GeoPoint> route(const Cursor& at, const std::string& raw) {
  std::vector<GeoPoint> pts;
  for (const auto& piece : detail::split(raw, ';')) {
    const std::string p = detail::trim(piece);
    if (p.empty()) continue;
    const auto xy = detail::split(p, ',');
    if (xy.size() != 2) at.fail("waypoint must be 'x,y': " + p);
    pts.push_back(GeoPoint{number(at, "route", xy[0]), number(at, "route", xy[1])});
  }
  if (pts.empty()) at.fail("route needs at least one waypoint");
  return pts;
}

}  // namespace parse_detail

namespace scenario_detail {

struct RawBlock {
  std::string section;
  int line = 0;  // of the [section] header
  std::vector<std::tuple<std::string, std::string, int>> entries;  // key, value, line
};

inline std::vector<RawBlock> tokenize(const std::string& text, const std::string& file) {
  std::vector<RawBlock> blocks;
  std::istringstream in(text);
  std::string raw_line;
  int line_no = 0;
  while (std::getline(in, raw_line)) {
    ++line_no;
    auto hash = raw_line.find('#');
    if (hash != std::string::npos) raw_line.erase(hash);
    const std::string line = detail::trim(raw_line);
    if (line.empty()) continue;
    parse_detail::Cursor at{file, line_no};
    if (line.front() == '[') {
      if (line.back() != ']') at.fail("unterminated section header");
      const std::string name = detail::trim(line.substr(1, line.size() - 2));
      if (name.empty()) at.fail("empty section name");
      blocks.push_back(RawBlock{name, line_no, {}});
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos) at.fail("expected 'key = value'");
    if (blocks.empty()) at.fail("key outside any section");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (key.empty()) at.fail("empty key");
    blocks.back().entries.emplace_back(key, value, line_no);
  }
  return blocks;
}

/// Tracks which keys a block has used so repeated scalar keys are caught.
class BlockReader {
 public:
  BlockReader(const RawBlock& block, std::string file) : block_(block), file_(std::move(file)) {}

  parse_detail::Cursor at(int line) const { return parse_detail::Cursor{file_, line}; }
  parse_detail::Cursor header() const { return at(block_.line); }

  /// Visits every entry; `repeatable` keys may appear any number of
  /// times, others at most once. Unknown keys are rejected.
  template <typename Fn>
  void each(const std::set<std::string>& known, const std::set<std::string>& repeatable, Fn&& fn) {
    std::set<std::string> seen;
    for (const auto& [key, value, line] : block_.entries) {
      const auto cur = at(line);
      if (!known.count(key)) cur.fail("unknown key '" + key + "' in [" + block_.section + "]");
      if (!repeatable.count(key) && !seen.insert(key).second) {
        cur.fail("duplicate key '" + key + "' in [" + block_.section + "]");
      }
      fn(key, value, cur);
    }
  }

 private:
  const RawBlock& block_;
  std::string file_;
};

}  // namespace scenario_detail

/// Parses scenario text into an unvalidated Scenario. Structural problems
/// (syntax, unknown keys, duplicate ids, dangling references, out-of-range
/// values) throw ParseError with a file:line position. Semantic adequacy
/// is validate_topology's job, not the parser's.
inline Scenario parse_scenario_text(const std::string& text, const std::string& file) {
  using parse_detail::Cursor;
  using scenario_detail::BlockReader;

  Scenario sc;
  sc.source_path = file;
  {
    auto slash = file.find_last_of("/\\");
    std::string base = slash == std::string::npos ? file : file.substr(slash + 1);
    auto dot = base.rfind('.');
    sc.name = dot == std::string::npos ? base : base.substr(0, dot);
    if (sc.name.empty()) sc.name = "scenario";
  }

  const auto blocks = scenario_detail::tokenize(text, file);
  bool saw_cdc = false, saw_sim = false;
  std::set<std::string> present;
  for (const auto& block : blocks) present.insert(block.section);
  for (const char* required : {"region", "sensor", "sdcc", "dpc", "cdc"}) {
    if (!present.count(required)) {
      throw ParseError(file, 1, std::string("missing required section [") + required + "]");
    }
  }

  std::map<int, std::vector<std::pair<int, double>>> pending_providers;  // sdcc -> providers

  for (const auto& block : blocks) {
    BlockReader reader(block, file);
    if (block.section == "sim") {
      if (saw_sim) reader.header().fail("duplicate [sim] section");
      saw_sim = true;
      reader.each(
          {"delta", "horizon", "mobility_tick", "reading_bytes", "link_efficiency",
           "wireless_latency", "inter_dpc_latency", "dpc_cdc_latency", "cdc_dcc_latency",
           "sms_batch_size", "merge_lookback", "escalate_unmatched", "false_value_max"},
          {}, [&](const std::string& key, const std::string& value, const Cursor& at) {
            if (key == "delta") {
              sc.topology.delta = parse_detail::number(at, key, value);
              if (sc.topology.delta < 0) at.fail("delta must be nonnegative");
            } else if (key == "horizon") {
              sc.params.default_horizon = parse_detail::number(at, key, value);
              if (sc.params.default_horizon < 0) at.fail("horizon must be nonnegative");
            } else if (key == "mobility_tick") {
              sc.params.mobility_tick = parse_detail::number(at, key, value);
              if (sc.params.mobility_tick <= 0) at.fail("mobility_tick must be positive");
            } else if (key == "reading_bytes") {
              sc.params.reading_bytes = parse_detail::integer(at, key, value);
              if (sc.params.reading_bytes <= 0) at.fail("reading_bytes must be positive");
            } else if (key == "link_efficiency") {
              sc.params.link_efficiency = parse_detail::number(at, key, value);
              if (sc.params.link_efficiency <= 0 || sc.params.link_efficiency > 1) {
                at.fail("link_efficiency must be in (0, 1]");
              }
            } else if (key == "wireless_latency") {
              sc.params.wireless_latency = parse_detail::number(at, key, value);
            } else if (key == "inter_dpc_latency") {
              sc.params.inter_dpc_latency = parse_detail::number(at, key, value);
            } else if (key == "dpc_cdc_latency") {
              sc.params.dpc_cdc_latency = parse_detail::number(at, key, value);
            } else if (key == "cdc_dcc_latency") {
              sc.params.cdc_dcc_latency = parse_detail::number(at, key, value);
            } else if (key == "sms_batch_size") {
              sc.params.sms_batch_size = static_cast<int>(parse_detail::integer(at, key, value));
              if (sc.params.sms_batch_size <= 0) at.fail("sms_batch_size must be positive");
            } else if (key == "merge_lookback") {
              sc.params.merge_lookback = parse_detail::number(at, key, value);
            } else if (key == "escalate_unmatched") {
              sc.params.escalate_unmatched = parse_detail::boolean(at, key, value);
            } else if (key == "false_value_max") {
              sc.params.false_value_max = parse_detail::number(at, key, value);
              if (sc.params.false_value_max <= 0) at.fail("false_value_max must be positive");
            }
          });
    } else if (block.section == "region") {
      Region r;
      bool has_id = false;
      reader.each({"id", "link", "width", "height", "hint"}, {"hint"},
                  [&](const std::string& key, const std::string& value, const Cursor& at) {
                    if (key == "id") {
                      r.id = static_cast<RegionId>(parse_detail::integer(at, key, value));
                      has_id = true;
                    } else if (key == "link") {
                      WifiStandard std_out;
                      if (!parse_wifi_standard(value, std_out)) {
                        at.fail("unknown wireless standard: " + value);
                      }
                      r.link = make_link_spec(std_out);
                    } else if (key == "width") {
                      r.width = parse_detail::number(at, key, value);
                      if (r.width <= 0) at.fail("width must be positive");
                    } else if (key == "height") {
                      r.height = parse_detail::number(at, key, value);
                      if (r.height <= 0) at.fail("height must be positive");
                    } else if (key == "hint") {
                      const auto parts = detail::split_limit(value, ':', 2);
                      if (parts.size() != 2) at.fail("hint must be 'modality:class'");
                      Modality m;
                      HazardClass h;
                      if (!parse_modality(detail::trim(parts[0]), m)) {
                        at.fail("unknown modality: " + parts[0]);
                      }
                      if (!parse_hazard_class(detail::trim(parts[1]), h)) {
                        at.fail("unknown hazard class: " + parts[1]);
                      }
                      r.hint_overrides[m] = h;
                    }
                  });
      if (!has_id) reader.header().fail("[region] requires an id");
      for (const auto& other : sc.topology.regions) {
        if (other.id == r.id) reader.header().fail("duplicate region id " + std::to_string(r.id));
      }
      sc.topology.regions.push_back(std::move(r));
    } else if (block.section == "sensor") {
      SensorNode s;
      bool has_id = false, has_region = false, has_x = false, has_y = false;
      reader.each({"id", "region", "x", "y", "modality", "false_report_prob", "fail_at"}, {},
                  [&](const std::string& key, const std::string& value, const Cursor& at) {
                    if (key == "id") {
                      s.id = static_cast<SensorId>(parse_detail::integer(at, key, value));
                      has_id = true;
                    } else if (key == "region") {
                      s.region = static_cast<RegionId>(parse_detail::integer(at, key, value));
                      has_region = true;
                    } else if (key == "x") {
                      s.position.x = parse_detail::number(at, key, value);
                      has_x = true;
                    } else if (key == "y") {
                      s.position.y = parse_detail::number(at, key, value);
                      has_y = true;
                    } else if (key == "modality") {
                      if (!parse_modality(value, s.modality)) {
                        at.fail("unknown modality: " + value);
                      }
                    } else if (key == "false_report_prob") {
                      s.false_report_prob = parse_detail::number(at, key, value);
                      if (s.false_report_prob < 0 || s.false_report_prob > 1) {
                        at.fail("false_report_prob must be in [0, 1]");
                      }
                    } else if (key == "fail_at") {
                      s.fail_at = parse_detail::number(at, key, value);
                      if (s.fail_at < 0) at.fail("fail_at must be nonnegative");
                    }
                  });
      if (!has_id || !has_region || !has_x || !has_y) {
        reader.header().fail("[sensor] requires id, region, x, y");
      }
      for (const auto& other : sc.topology.sensors) {
        if (other.id == s.id) reader.header().fail("duplicate sensor id " + std::to_string(s.id));
      }
      sc.topology.sensors.push_back(std::move(s));
    } else if (block.section == "sdcc") {
      Sdcc s;
      bool has_id = false, has_region = false, has_x = false, has_y = false;
      std::vector<std::pair<int, double>> providers;
      reader.each({"id", "region", "x", "y", "tau", "window", "baseline", "provider"},
                  {"baseline", "provider"},
                  [&](const std::string& key, const std::string& value, const Cursor& at) {
                    if (key == "id") {
                      s.id = static_cast<SdccId>(parse_detail::integer(at, key, value));
                      has_id = true;
                    } else if (key == "region") {
                      s.region = static_cast<RegionId>(parse_detail::integer(at, key, value));
                      has_region = true;
                    } else if (key == "x") {
                      s.position.x = parse_detail::number(at, key, value);
                      has_x = true;
                    } else if (key == "y") {
                      s.position.y = parse_detail::number(at, key, value);
                      has_y = true;
                    } else if (key == "tau") {
                      const auto t = parse_detail::integer(at, key, value);
                      if (t < 1) at.fail("tau must be at least 1");
                      s.tau = static_cast<int>(t);
                    } else if (key == "window") {
                      s.window = parse_detail::number(at, key, value);
                      if (s.window <= 0) at.fail("window must be positive");
                    } else if (key == "baseline") {
                      const auto parts = detail::split_limit(value, ':', 3);
                      if (parts.size() != 3) {
                        at.fail("baseline must be 'category:bytes:description'");
                      }
                      BaselineRecord rec;
                      if (!parse_baseline_category(detail::trim(parts[0]), rec.category)) {
                        at.fail("unknown baseline category: " + parts[0]);
                      }
                      rec.payload_bytes = parse_detail::integer(at, key, parts[1]);
                      if (rec.payload_bytes < 0) at.fail("baseline bytes must be nonnegative");
                      rec.description = detail::trim(parts[2]);
                      s.baseline.push_back(std::move(rec));
                    } else if (key == "provider") {
                      const auto parts = detail::split_limit(value, ':', 2);
                      if (parts.size() != 2) at.fail("provider must be 'subscribers:latency'");
                      const auto subs = parse_detail::integer(at, key, parts[0]);
                      const double lat = parse_detail::number(at, key, parts[1]);
                      if (subs < 0) at.fail("subscriber count must be nonnegative");
                      if (lat <= 0) at.fail("provider latency must be positive");
                      providers.emplace_back(static_cast<int>(subs), lat);
                    }
                  });
      if (!has_id || !has_region || !has_x || !has_y) {
        reader.header().fail("[sdcc] requires id, region, x, y");
      }
      for (const auto& other : sc.topology.sdccs) {
        if (other.id == s.id) reader.header().fail("duplicate sdcc id " + std::to_string(s.id));
      }
      for (auto& rec : s.baseline) rec.area_id = s.id;
      if (!providers.empty()) pending_providers[s.id] = std::move(providers);
      sc.topology.sdccs.push_back(std::move(s));
    } else if (block.section == "map") {
      MapUnit m;
      bool has_id = false, has_region = false, has_route = false;
      reader.each({"id", "region", "speed", "contact_range", "buffer_capacity", "mobility",
                   "route", "link"},
                  {},
                  [&](const std::string& key, const std::string& value, const Cursor& at) {
                    if (key == "id") {
                      m.id = static_cast<MapId>(parse_detail::integer(at, key, value));
                      has_id = true;
                    } else if (key == "region") {
                      m.region = static_cast<RegionId>(parse_detail::integer(at, key, value));
                      has_region = true;
                    } else if (key == "speed") {
                      m.speed = parse_detail::number(at, key, value);
                      if (m.speed <= 0) at.fail("speed must be positive");
                    } else if (key == "contact_range") {
                      m.contact_range = parse_detail::number(at, key, value);
                      if (m.contact_range <= 0) at.fail("contact_range must be positive");
                    } else if (key == "buffer_capacity") {
                      m.buffer_capacity = parse_detail::integer(at, key, value);
                      if (m.buffer_capacity <= 0) at.fail("buffer_capacity must be positive");
                    } else if (key == "mobility") {
                      const std::string v = detail::lower(detail::trim(value));
                      if (v == "patrol") {
                        m.mobility = MobilityMode::patrol;
                      } else if (v == "random_waypoint" || v == "random-waypoint") {
                        m.mobility = MobilityMode::random_waypoint;
                      } else {
                        at.fail("unknown mobility mode: " + value);
                      }
                    } else if (key == "route") {
                      m.route = parse_detail::route(at, value);
                      has_route = true;
                    } else if (key == "link") {
                      WifiStandard std_out;
                      if (!parse_wifi_standard(value, std_out)) {
                        at.fail("unknown wireless standard: " + value);
                      }
                      m.link_override = std_out;
                    }
                  });
      if (!has_id || !has_region) reader.header().fail("[map] requires id and region");
      if (!has_route) reader.header().fail("[map] requires a route");
      for (const auto& other : sc.topology.maps) {
        if (other.id == m.id) reader.header().fail("duplicate map id " + std::to_string(m.id));
      }
      sc.topology.maps.push_back(std::move(m));
    } else if (block.section == "dpc") {
      Dpc d;
      bool has_id = false, has_region = false, has_x = false, has_y = false;
      reader.each({"id", "region", "x", "y", "confidence_threshold", "max_reprocess",
                   "service_time", "peer"},
                  {"peer"},
                  [&](const std::string& key, const std::string& value, const Cursor& at) {
                    if (key == "id") {
                      d.id = static_cast<DpcId>(parse_detail::integer(at, key, value));
                      has_id = true;
                    } else if (key == "region") {
                      d.region = static_cast<RegionId>(parse_detail::integer(at, key, value));
                      has_region = true;
                    } else if (key == "x") {
                      d.position.x = parse_detail::number(at, key, value);
                      has_x = true;
                    } else if (key == "y") {
                      d.position.y = parse_detail::number(at, key, value);
                      has_y = true;
                    } else if (key == "confidence_threshold") {
                      d.confidence_threshold = parse_detail::number(at, key, value);
                      if (d.confidence_threshold < 0 || d.confidence_threshold > 1) {
                        at.fail("confidence_threshold must be in [0, 1]");
                      }
                    } else if (key == "max_reprocess") {
                      const auto n = parse_detail::integer(at, key, value);
                      if (n < 0) at.fail("max_reprocess must be nonnegative");
                      d.max_reprocess = static_cast<int>(n);
                    } else if (key == "service_time") {
                      d.service_time = parse_detail::number(at, key, value);
                      if (d.service_time < 0) at.fail("service_time must be nonnegative");
                    } else if (key == "peer") {
                      d.peers.push_back(static_cast<DpcId>(parse_detail::integer(at, key, value)));
                    }
                  });
      if (!has_id || !has_region || !has_x || !has_y) {
        reader.header().fail("[dpc] requires id, region, x, y");
      }
      for (const auto& other : sc.topology.dpcs) {
        if (other.id == d.id) reader.header().fail("duplicate dpc id " + std::to_string(d.id));
      }
      sc.topology.dpcs.push_back(std::move(d));
    } else if (block.section == "cdc") {
      if (saw_cdc) reader.header().fail("duplicate [cdc] section");
      saw_cdc = true;
      auto& cdc = sc.topology.cdc_dcc;
      std::set<HazardClass> explicit_bypass;
      bool saw_bypass = false;
      reader.each({"count", "match_threshold", "reference", "bypass"}, {"reference", "bypass"},
                  [&](const std::string& key, const std::string& value, const Cursor& at) {
                    if (key == "count") {
                      const auto n = parse_detail::integer(at, key, value);
                      if (n < 1) at.fail("count must be at least 1");
                      cdc.cdc_count = static_cast<int>(n);
                    } else if (key == "match_threshold") {
                      cdc.match_threshold = parse_detail::number(at, key, value);
                      if (cdc.match_threshold < 0 || cdc.match_threshold > 1) {
                        at.fail("match_threshold must be in [0, 1]");
                      }
                    } else if (key == "reference") {
                      const auto parts = detail::split_limit(value, ':', 4);
                      if (parts.size() != 4) {
                        at.fail("reference must be 'area:class:f1,f2,...:outcome'");
                      }
                      DisasterRecord rec;
                      rec.area_id = static_cast<int>(parse_detail::integer(at, key, parts[0]));
                      if (!parse_hazard_class(detail::trim(parts[1]), rec.hazard_class)) {
                        at.fail("unknown hazard class: " + parts[1]);
                      }
                      for (const auto& f : detail::split(parts[2], ',')) {
                        rec.feature_vector.push_back(parse_detail::number(at, key, f));
                      }
                      rec.outcome = detail::trim(parts[3]);
                      rec.occurred_time = 0.0;
                      cdc.reference_db.push_back(std::move(rec));
                    } else if (key == "bypass") {
                      HazardClass h;
                      if (!parse_hazard_class(value, h)) {
                        at.fail("unknown hazard class: " + value);
                      }
                      explicit_bypass.insert(h);
                      saw_bypass = true;
                    }
                  });
      if (saw_bypass) cdc.bypass_classes = std::move(explicit_bypass);
    } else if (block.section == "hazard") {
      HazardEvent h;
      bool has_id = false, has_class = false, has_onset = false, has_region = false;
      std::string footprint_raw = "all";
      reader.each({"id", "class", "onset", "duration", "region", "magnitude", "footprint"}, {},
                  [&](const std::string& key, const std::string& value, const Cursor& at) {
                    if (key == "id") {
                      h.id = static_cast<int>(parse_detail::integer(at, key, value));
                      has_id = true;
                    } else if (key == "class") {
                      if (!parse_hazard_class(value, h.hazard_class)) {
                        at.fail("unknown hazard class: " + value);
                      }
                      has_class = true;
                    } else if (key == "onset") {
                      h.onset_time = parse_detail::number(at, key, value);
                      if (h.onset_time < 0) at.fail("onset must be nonnegative");
                      has_onset = true;
                    } else if (key == "duration") {
                      h.duration = parse_detail::number(at, key, value);
                      if (h.duration <= 0) at.fail("duration must be positive");
                    } else if (key == "region") {
                      h.region = static_cast<RegionId>(parse_detail::integer(at, key, value));
                      has_region = true;
                    } else if (key == "magnitude") {
                      h.magnitude = parse_detail::number(at, key, value);
                      if (h.magnitude <= 0) at.fail("magnitude must be positive");
                    } else if (key == "footprint") {
                      footprint_raw = detail::trim(value);
                    }
                  });
      if (!has_id || !has_class || !has_onset || !has_region) {
        reader.header().fail("[hazard] requires id, class, onset, region");
      }
      for (const auto& other : sc.hazards) {
        if (other.id == h.id) reader.header().fail("duplicate hazard id " + std::to_string(h.id));
      }
      // Footprint ids resolve after all sensors are known.
      h.footprint.clear();
      if (detail::lower(footprint_raw) != "all") {
        for (const auto& piece : detail::split(footprint_raw, ',')) {
          const std::string p = detail::trim(piece);
          if (p.empty()) continue;
          h.footprint.insert(
              static_cast<SensorId>(parse_detail::integer(reader.header(), "footprint", p)));
        }
        if (h.footprint.empty()) reader.header().fail("footprint selects no sensors");
      }
      h.footprint_all = detail::lower(footprint_raw) == "all";
      sc.hazards.push_back(std::move(h));
    } else {
      reader.header().fail("unknown section [" + block.section + "]");
    }
  }

  // Cross-reference checks: every region pointer must land somewhere.
  auto region_exists = [&](RegionId id) {
    return std::any_of(sc.topology.regions.begin(), sc.topology.regions.end(),
                       [&](const Region& r) { return r.id == id; });
  };
  auto bad_region = [&](const char* kind, int entity_id, RegionId region) {
    throw ParseError(file, 1,
                     std::string(kind) + " " + std::to_string(entity_id) +
                         " references unknown region " + std::to_string(region));
  };
  for (const auto& s : sc.topology.sensors) {
    if (!region_exists(s.region)) bad_region("sensor", s.id, s.region);
  }
  for (const auto& s : sc.topology.sdccs) {
    if (!region_exists(s.region)) bad_region("sdcc", s.id, s.region);
  }
  for (const auto& m : sc.topology.maps) {
    if (!region_exists(m.region)) bad_region("map", m.id, m.region);
  }
  for (const auto& d : sc.topology.dpcs) {
    if (!region_exists(d.region)) bad_region("dpc", d.id, d.region);
  }
  for (auto& h : sc.hazards) {
    if (!region_exists(h.region)) bad_region("hazard", h.id, h.region);
    if (h.footprint_all) {
      for (const auto& s : sc.topology.sensors) {
        if (s.region == h.region) h.footprint.insert(s.id);
      }
    } else {
      for (SensorId sid : h.footprint) {
        const auto* s = sc.topology.find_sensor(sid);
        if (!s) {
          throw ParseError(file, 1,
                           "hazard " + std::to_string(h.id) + " footprint references unknown sensor " +
                               std::to_string(sid));
        }
        if (s->region != h.region) {
          throw ParseError(file, 1,
                           "hazard " + std::to_string(h.id) + " footprint sensor " +
                               std::to_string(sid) + " is outside region " +
                               std::to_string(h.region));
        }
      }
    }
  }
  for (const auto& [sdcc_id, providers] : pending_providers) {
    for (const auto& [subs, latency] : providers) {
      SmsProvider p;
      p.area_id = sdcc_id;
      p.subscriber_count = subs;
      p.per_message_latency = latency;
      sc.topology.cdc_dcc.sms_providers.push_back(p);
    }
  }
  return sc;
}

inline Scenario parse_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, "cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario_text(buf.str(), path);
}

/// Full load pipeline: parse, cluster sensors onto collection centers,
/// resolve direct-link collapses. The result is ready to validate or run.
inline Scenario load_scenario_text(const std::string& text, const std::string& name) {
  Scenario sc = parse_scenario_text(text, name);
  assign_clusters(sc.topology.sensors, sc.topology.sdccs);
  apply_collapse(sc.topology);
  return sc;
}

inline Scenario load_scenario(const std::string& path) {
  Scenario sc = parse_scenario_file(path);
  assign_clusters(sc.topology.sensors, sc.topology.sdccs);
  apply_collapse(sc.topology);
  return sc;
}

}  // namespace dmsim
