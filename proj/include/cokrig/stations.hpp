#pragma once

// Monitoring-station input: great-circle hop lengths along an ordered chain
// of stations become a design on [0, 1].

#include <istream>
#include <string>
#include <vector>

#include "cokrig/kernel.hpp"

namespace cokrig {

inline constexpr double kEarthRadiusKm = 6371.0088;

struct StationRecord {
  std::string id;
  double lat = 0.0;  // degrees
  double lon = 0.0;  // degrees
  int order = 0;     // upstream-to-downstream rank
};

struct ObservationRecord {
  std::string station_id;
  double z1 = 0.0;
  double z2 = 0.0;
};

double haversine_km(double lat1, double lon1, double lat2, double lon2);

struct IngestReport {
  Design design;
  std::vector<StationRecord> stations;  // sorted by order
  std::vector<double> hops_km;          // adjacent great-circle distances
  double total_km = 0.0;
};

// Sorts by order; throws ParseError for duplicate orders or out-of-range
// coordinates and DomainError when two adjacent stations coincide.
IngestReport ingest_stations(std::vector<StationRecord> stations);

// `id,lat,lon,order` with a header row.
std::vector<StationRecord> read_stations_csv(std::istream& in, const std::string& source);

// `station_id,z1,z2` with a header row.
std::vector<ObservationRecord> read_observations_csv(std::istream& in, const std::string& source);

struct DesignFile {
  std::vector<double> gaps;  // normalized to sum 1
  std::vector<std::string> warnings;
};

// One gap per line, blank lines and `#` comments ignored.  Sums off by less
// than 1e-6 are renormalized with a warning; anything else is a ParseError.
DesignFile read_design_file(std::istream& in, const std::string& source);

void write_design_file(std::ostream& out, const Design& design);

// Observations reordered to match the ingested stations; every station needs
// exactly one record.
std::vector<ObservationRecord> align_observations(const std::vector<StationRecord>& stations,
                                                  const std::vector<ObservationRecord>& obs);

}  // namespace cokrig
