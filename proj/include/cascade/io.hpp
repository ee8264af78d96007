// CSV export and import of diagram curves, time series and scan tables.
// Values are serialized with 17 significant digits so a round trip through
// text recovers every double bit-exactly; files carry the full configuration
// echo as #-prefixed metadata lines so any output can be reproduced from its
// own header. Writes go through a temp-then-rename so readers never observe
// a half-written file.
#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cascade/integrate.hpp"
#include "cascade/relaxation.hpp"
#include "cascade/steady.hpp"

namespace cascade {

// Ordered key/value metadata echoed into every output file.
struct MetaBlock {
    std::vector<std::pair<std::string, std::string>> entries;

    void add(const std::string& key, const std::string& value);
    void add(const std::string& key, double value);
    void add(const std::string& key, long value);
};

// Shortest decimal form that parses back to the same double (at most 17
// significant digits).
std::string format_double(double v);

void write_file_atomic(const std::string& path, const std::string& content);

// Diagram schema: curve,Da,alpha1,alpha2,alpha_out,det_sign,stable
void write_diagram_csv(const std::string& path, const std::vector<DiagramCurve>& curves,
                       const MetaBlock& meta);

// Time-series schema: tau,alpha1,alpha2,alpha_out,io,phase
void write_timeseries_csv(const std::string& path, const Trajectory& trajectory,
                          const MetaBlock& meta);

// Scan schema: tau_rel,alpha_avg,settled,cycles
void write_scan_csv(const std::string& path, const ScanResult& scan, const MetaBlock& meta);

struct DiagramRow {
    std::string curve;
    double da = 0.0;
    double alpha1 = 0.0;
    double alpha2 = 0.0;
    double alpha_out = 0.0;
    int det_sign = 0;
    std::optional<bool> stable;
};

struct TimeseriesRow {
    double tau = 0.0;
    double alpha1 = 0.0;
    double alpha2 = 0.0;
    double alpha_out = 0.0;
    int io = 0;
    std::string phase;
};

struct ScanRow {
    double tau_rel = 0.0;
    double alpha_avg = 0.0;
    bool settled = false;
    int cycles = 0;
};

std::vector<DiagramRow> read_diagram_csv(const std::string& path);
std::vector<TimeseriesRow> read_timeseries_csv(const std::string& path);
std::vector<ScanRow> read_scan_csv(const std::string& path);

// Minimal SVG plot: one polyline per named series over labeled axes, ranges
// taken from the data with a 5% margin. Convenience output only; the CSV is
// the authoritative artifact.
struct SvgSeries {
    std::string name;
    std::vector<std::pair<double, double>> points;
};
void write_svg_plot(const std::string& path, const std::vector<SvgSeries>& series,
                    const std::string& x_label, const std::string& y_label);

}  // namespace cascade
