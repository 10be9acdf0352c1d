#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "dmsim/digest.hpp"

namespace dmsim {

using TraceJson = nlohmann::ordered_json;

/// Accumulates the run trace as JSON Lines. One object per line, `t` and
/// `kind` first, insertion order preserved, timestamps nondecreasing.
class TraceWriter {
 public:
  void emit(double t, const std::string& kind, TraceJson fields = TraceJson::object()) {
    if (t < last_t_) throw std::logic_error("trace time went backwards");
    last_t_ = t;
    TraceJson line = TraceJson::object();
    line["t"] = t;
    line["kind"] = kind;
    for (auto& [key, value] : fields.items()) line[key] = std::move(value);
    lines_.push_back(line.dump());
  }

  const std::vector<std::string>& lines() const { return lines_; }

  std::string text() const {
    std::string out;
    for (const auto& line : lines_) {
      out += line;
      out += '\n';
    }
    return out;
  }

  std::string digest() const { return sha256_hex(text()); }

 private:
  std::vector<std::string> lines_;
  double last_t_ = 0.0;
};

}  // namespace dmsim
