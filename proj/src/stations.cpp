#include "cokrig/stations.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <iomanip>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "cokrig/errors.hpp"

namespace cokrig {

namespace {

constexpr double kDegree = M_PI / 180.0;

[[noreturn]] void fail(const std::string& source, std::size_t line, const std::string& what) {
  std::ostringstream msg;
  msg << source << ':' << line << ": " << what;
  throw ParseError(msg.str());
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(trim(field));
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_double(const std::string& text, const std::string& source, std::size_t line, const char* what) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) fail(source, line, std::string("invalid ") + what + " '" + text + "'");
  return v;
}

int parse_int(const std::string& text, const std::string& source, std::size_t line, const char* what) {
  int v = 0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) fail(source, line, std::string("invalid ") + what + " '" + text + "'");
  return v;
}

// Reads data rows after checking the header; calls row(fields, line_no).
template <class Row>
void read_table(std::istream& in, const std::string& source, const std::vector<std::string>& header, Row row) {
  std::string line;
  std::size_t line_no = 0;
  bool seen_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    auto fields = split_csv(t);
    if (!seen_header) {
      if (fields != header) {
        std::string expected;
        for (const auto& h : header) expected += (expected.empty() ? "" : ",") + h;
        fail(source, line_no, "expected header '" + expected + "'");
      }
      seen_header = true;
      continue;
    }
    if (fields.size() != header.size()) {
      std::ostringstream msg;
      msg << "expected " << header.size() << " fields, found " << fields.size();
      fail(source, line_no, msg.str());
    }
    row(fields, line_no);
  }
  if (!seen_header) fail(source, line_no, "missing header row");
}

}  // namespace

double haversine_km(double lat1, double lon1, double lat2, double lon2) {
  const double p1 = lat1 * kDegree, p2 = lat2 * kDegree;
  const double dp = (lat2 - lat1) * kDegree, dl = (lon2 - lon1) * kDegree;
  const double h = std::pow(std::sin(0.5 * dp), 2) + std::cos(p1) * std::cos(p2) * std::pow(std::sin(0.5 * dl), 2);
  return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(h)));
}

IngestReport ingest_stations(std::vector<StationRecord> stations) {
  if (stations.size() < 2) throw DomainError("ingestion needs at least two stations");
  for (const auto& s : stations) {
    if (!(std::abs(s.lat) <= 90.0) || !(std::abs(s.lon) <= 180.0)) {
      std::ostringstream msg;
      msg << "station " << s.id << ": coordinates (" << s.lat << ", " << s.lon << ") out of range";
      throw ParseError(msg.str());
    }
  }
  std::stable_sort(stations.begin(), stations.end(),
                   [](const StationRecord& a, const StationRecord& b) { return a.order < b.order; });
  std::set<std::string> ids;
  for (std::size_t i = 0; i < stations.size(); ++i) {
    if (i > 0 && stations[i].order == stations[i - 1].order) {
      std::ostringstream msg;
      msg << "stations " << stations[i - 1].id << " and " << stations[i].id << " share order " << stations[i].order;
      throw ParseError(msg.str());
    }
    if (!ids.insert(stations[i].id).second) throw ParseError("duplicate station id " + stations[i].id);
  }
  IngestReport report{Design(std::vector<double>{1.0}), {}, {}, 0.0};
  for (std::size_t i = 1; i < stations.size(); ++i) {
    const double hop = haversine_km(stations[i - 1].lat, stations[i - 1].lon, stations[i].lat, stations[i].lon);
    if (!(hop > 0.0)) {
      throw DomainError("stations " + stations[i - 1].id + " and " + stations[i].id +
                        " coincide (zero gap)");
    }
    report.hops_km.push_back(hop);
  }
  report.total_km = std::accumulate(report.hops_km.begin(), report.hops_km.end(), 0.0);
  std::vector<double> gaps(report.hops_km);
  for (double& g : gaps) g /= report.total_km;
  report.design = Design::on_interval(0.0, 1.0, std::move(gaps));
  report.stations = std::move(stations);
  return report;
}

std::vector<StationRecord> read_stations_csv(std::istream& in, const std::string& source) {
  std::vector<StationRecord> out;
  read_table(in, source, {"id", "lat", "lon", "order"}, [&](const std::vector<std::string>& f, std::size_t line) {
    StationRecord s{f[0], parse_double(f[1], source, line, "latitude"), parse_double(f[2], source, line, "longitude"),
                    parse_int(f[3], source, line, "order")};
    if (s.id.empty()) fail(source, line, "empty station id");
    if (std::abs(s.lat) > 90.0) fail(source, line, "latitude " + f[1] + " outside [-90, 90]");
    if (std::abs(s.lon) > 180.0) fail(source, line, "longitude " + f[2] + " outside [-180, 180]");
    out.push_back(std::move(s));
  });
  return out;
}

std::vector<ObservationRecord> read_observations_csv(std::istream& in, const std::string& source) {
  std::vector<ObservationRecord> out;
  std::set<std::string> seen;
  read_table(in, source, {"station_id", "z1", "z2"}, [&](const std::vector<std::string>& f, std::size_t line) {
    if (!seen.insert(f[0]).second) fail(source, line, "second record for station " + f[0]);
    out.push_back({f[0], parse_double(f[1], source, line, "z1"), parse_double(f[2], source, line, "z2")});
  });
  return out;
}

DesignFile read_design_file(std::istream& in, const std::string& source) {
  DesignFile file;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line.substr(0, line.find('#')));
    if (t.empty()) continue;
    const double g = parse_double(t, source, line_no, "gap");
    if (!(g > 0.0)) fail(source, line_no, "gap " + t + " is not positive");
    file.gaps.push_back(g);
  }
  if (file.gaps.empty()) fail(source, line_no, "design file has no gaps");
  const double total = std::accumulate(file.gaps.begin(), file.gaps.end(), 0.0);
  const double off = std::abs(total - 1.0);
  if (off >= 1e-6) {
    std::ostringstream msg;
    msg << "gaps sum to " << std::setprecision(12) << total << ", not 1";
    fail(source, line_no, msg.str());
  }
  if (off > 1e-12) {
    std::ostringstream msg;
    msg << source << ": gaps sum to " << std::setprecision(12) << total << "; renormalized to 1";
    file.warnings.push_back(msg.str());
  }
  for (double& g : file.gaps) g /= total;
  return file;
}

void write_design_file(std::ostream& out, const Design& design) {
  const Design unit = design.normalized();
  out << std::setprecision(17);
  for (double g : unit.gaps()) out << g << '\n';
}

std::vector<ObservationRecord> align_observations(const std::vector<StationRecord>& stations,
                                                  const std::vector<ObservationRecord>& obs) {
  std::map<std::string, const ObservationRecord*> by_id;
  for (const auto& o : obs) by_id[o.station_id] = &o;
  std::vector<ObservationRecord> out;
  for (const auto& s : stations) {
    auto it = by_id.find(s.id);
    if (it == by_id.end()) throw ParseError("no observation for station " + s.id);
    out.push_back(*it->second);
  }
  if (out.size() != obs.size()) throw ParseError("observations reference unknown stations");
  return out;
}

}  // namespace cokrig
