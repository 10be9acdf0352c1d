#pragma once

#include <stdexcept>
#include <string>

namespace dmsim {

enum class WifiStandard { dot11b, dot11g, dot11a };

/// Nominal Wi-Fi link parameters. The three fields are a fixed function of
/// the standard: 802.11b runs 11 Mbps on 2.4 GHz with 3 non-overlapping
/// channels, 802.11g runs 54 Mbps on the same band, 802.11a runs 54 Mbps
/// on 5 GHz with 12 non-overlapping channels.
struct LinkSpec {
  WifiStandard standard = WifiStandard::dot11b;
  double rate_mbps = 11.0;
  double band_ghz = 2.4;
  int channels = 3;
};

inline LinkSpec make_link_spec(WifiStandard std_) {
  switch (std_) {
    case WifiStandard::dot11b:
      return LinkSpec{WifiStandard::dot11b, 11.0, 2.4, 3};
    case WifiStandard::dot11g:
      return LinkSpec{WifiStandard::dot11g, 54.0, 2.4, 3};
    case WifiStandard::dot11a:
      return LinkSpec{WifiStandard::dot11a, 54.0, 5.0, 12};
  }
  throw std::logic_error("unknown wifi standard");
}

inline std::string to_string(WifiStandard s) {
  switch (s) {
    case WifiStandard::dot11b: return "802.11b";
    case WifiStandard::dot11g: return "802.11g";
    case WifiStandard::dot11a: return "802.11a";
  }
  return "?";
}

inline bool parse_wifi_standard(const std::string& text, WifiStandard& out) {
  if (text == "802.11b" || text == "b") { out = WifiStandard::dot11b; return true; }
  if (text == "802.11g" || text == "g") { out = WifiStandard::dot11g; return true; }
  if (text == "802.11a" || text == "a") { out = WifiStandard::dot11a; return true; }
  return false;
}

/// Payload bytes per second for a nominal link rate and efficiency factor.
inline double link_bytes_per_second(const LinkSpec& link, double efficiency = 1.0) {
  return link.rate_mbps * 1e6 / 8.0 * efficiency;
}

}  // namespace dmsim
