#ifndef HMK_IO_HPP
#define HMK_IO_HPP

#include <string>

#include "hmk/geodesy.hpp"
#include "hmk/measures.hpp"
#include "hmk/solver.hpp"

// JSON file formats (all carry "format_version": 1), OBJ boundary meshes
// and CSV curve emission.

namespace hmk {

std::string point_to_json(const GroupPoint& g);
GroupPoint point_from_json(const std::string& text);

std::string support_to_json(const SupportVector& f);
SupportVector support_from_json(const std::string& text);

std::string measure_to_json(const DiscreteSphereMeasure& mu);
DiscreteSphereMeasure measure_from_json(const std::string& text);

std::string report_to_json(const SolveReport& rep);

/// Triangulated boundary sample of the body on a polar/azimuth ray grid,
/// Wavefront OBJ text.
std::string body_to_obj(const WulffBody& body, int n_polar = 48,
                        int n_azimuth = 96);

/// CSV rows (s, x.., y.., t) of the geodesic curve.
std::string geodesic_to_csv(const GeodesicParams& p, int rows = 65);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace hmk

#endif  // HMK_IO_HPP
