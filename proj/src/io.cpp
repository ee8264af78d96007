#include "cascade/io.hpp"

#include <cerrno>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "cascade/version.hpp"

namespace cascade {

namespace {

std::string meta_lines(const MetaBlock& meta) {
    std::string out = "# rfcascade " + std::string(kVersion) + "\n";
    for (const auto& [key, value] : meta.entries) out += "# " + key + " = " + value + "\n";
    return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(field);
            field.clear();
        } else {
            field += c;
        }
    }
    fields.push_back(field);
    return fields;
}

double parse_double(const std::string& s, const std::string& path) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str())
        throw std::runtime_error(path + ": malformed numeric field '" + s + "'");
    return v;
}

// Yields data lines (metadata and the header line skipped).
std::vector<std::string> read_data_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path + ": " + std::strerror(errno));
    std::vector<std::string> lines;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            header_seen = true;  // column header
            continue;
        }
        lines.push_back(line);
    }
    return lines;
}

std::string stable_field(const std::optional<bool>& stable) {
    if (!stable.has_value()) return "";
    return *stable ? "1" : "0";
}

}  // namespace

void MetaBlock::add(const std::string& key, const std::string& value) {
    entries.emplace_back(key, value);
}
void MetaBlock::add(const std::string& key, double value) {
    entries.emplace_back(key, format_double(value));
}
void MetaBlock::add(const std::string& key, long value) {
    entries.emplace_back(key, std::to_string(value));
}

std::string format_double(double v) {
    char buf[40];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc{}) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return buf;
    }
    return std::string(buf, end);
}

void write_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp + ": " + std::strerror(errno));
        out << content;
        if (!out.flush())
            throw std::runtime_error("write failed for " + tmp + ": " + std::strerror(errno));
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw std::runtime_error("cannot rename " + tmp + " to " + path + ": " +
                                 std::strerror(errno));
}

void write_diagram_csv(const std::string& path, const std::vector<DiagramCurve>& curves,
                       const MetaBlock& meta) {
    std::string out = meta_lines(meta);
    out += "curve,Da,alpha1,alpha2,alpha_out,det_sign,stable\n";
    for (const DiagramCurve& curve : curves) {
        const char* kind = curve_kind_name(curve.kind);
        for (const BranchPoint& p : curve.points) {
            out += kind;
            out += ',';
            out += format_double(p.p);
            out += ',';
            out += format_double(p.state.alpha1);
            out += ',';
            out += format_double(p.state.alpha2);
            out += ',';
            out += format_double(p.alpha_out);
            out += ',';
            out += std::to_string(p.det_sign);
            out += ',';
            out += stable_field(p.stable);
            out += '\n';
        }
    }
    write_file_atomic(path, out);
}

void write_timeseries_csv(const std::string& path, const Trajectory& trajectory,
                          const MetaBlock& meta) {
    std::string out = meta_lines(meta);
    out += "tau,alpha1,alpha2,alpha_out,io,phase\n";
    for (const TrajectorySample& s : trajectory.samples) {
        out += format_double(s.tau);
        out += ',';
        out += format_double(s.state.alpha1);
        out += ',';
        out += format_double(s.state.alpha2);
        out += ',';
        out += format_double(s.alpha_out);
        out += ',';
        out += std::to_string(io_value(s.dir));
        out += ',';
        out += s.phase == CyclePhase::series ? "series" : "relaxing";
        out += '\n';
    }
    write_file_atomic(path, out);
}

void write_scan_csv(const std::string& path, const ScanResult& scan, const MetaBlock& meta) {
    MetaBlock extended = meta;
    extended.add("best_tau_rel", scan.best_tau_rel);
    extended.add("best_average", scan.best_average);
    extended.add("gain_vs_reverse",
                 scan.gain_vs_reverse ? format_double(*scan.gain_vs_reverse) : std::string("n/a"));
    extended.add("gain_vs_constant", scan.gain_vs_constant ? format_double(*scan.gain_vs_constant)
                                                           : std::string("n/a"));
    extended.add("cold_check_average", scan.cold_check_average);
    extended.add("cold_check_consistent", std::string(scan.cold_check_consistent ? "1" : "0"));

    std::string out = meta_lines(extended);
    out += "tau_rel,alpha_avg,settled,cycles\n";
    for (const ScanEntry& e : scan.table) {
        out += format_double(e.tau_rel);
        out += ',';
        out += format_double(e.average);
        out += ',';
        out += e.settled ? '1' : '0';
        out += ',';
        out += std::to_string(e.cycles);
        out += '\n';
    }
    write_file_atomic(path, out);
}

std::vector<DiagramRow> read_diagram_csv(const std::string& path) {
    std::vector<DiagramRow> rows;
    for (const std::string& line : read_data_lines(path)) {
        const std::vector<std::string> f = split_csv_line(line);
        if (f.size() != 7) throw std::runtime_error(path + ": expected 7 fields, got line " + line);
        DiagramRow row;
        row.curve = f[0];
        row.da = parse_double(f[1], path);
        row.alpha1 = parse_double(f[2], path);
        row.alpha2 = parse_double(f[3], path);
        row.alpha_out = parse_double(f[4], path);
        row.det_sign = static_cast<int>(parse_double(f[5], path));
        if (!f[6].empty()) row.stable = f[6] == "1";
        rows.push_back(row);
    }
    return rows;
}

std::vector<TimeseriesRow> read_timeseries_csv(const std::string& path) {
    std::vector<TimeseriesRow> rows;
    for (const std::string& line : read_data_lines(path)) {
        const std::vector<std::string> f = split_csv_line(line);
        if (f.size() != 6) throw std::runtime_error(path + ": expected 6 fields, got line " + line);
        TimeseriesRow row;
        row.tau = parse_double(f[0], path);
        row.alpha1 = parse_double(f[1], path);
        row.alpha2 = parse_double(f[2], path);
        row.alpha_out = parse_double(f[3], path);
        row.io = static_cast<int>(parse_double(f[4], path));
        row.phase = f[5];
        rows.push_back(row);
    }
    return rows;
}

std::vector<ScanRow> read_scan_csv(const std::string& path) {
    std::vector<ScanRow> rows;
    for (const std::string& line : read_data_lines(path)) {
        const std::vector<std::string> f = split_csv_line(line);
        if (f.size() != 4) throw std::runtime_error(path + ": expected 4 fields, got line " + line);
        ScanRow row;
        row.tau_rel = parse_double(f[0], path);
        row.alpha_avg = parse_double(f[1], path);
        row.settled = f[2] == "1";
        row.cycles = static_cast<int>(parse_double(f[3], path));
        rows.push_back(row);
    }
    return rows;
}

namespace {

struct Range {
    double lo = 0.0, hi = 1.0;
    void widen() {
        if (hi <= lo) {
            lo -= 0.5;
            hi += 0.5;
        }
        const double margin = 0.05 * (hi - lo);
        lo -= margin;
        hi += margin;
    }
};

std::string svg_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

}  // namespace

void write_svg_plot(const std::string& path, const std::vector<SvgSeries>& series,
                    const std::string& x_label, const std::string& y_label) {
    constexpr int width = 840, height = 600;
    constexpr int left = 80, right = 20, top = 20, bottom = 60;
    const double plot_w = width - left - right;
    const double plot_h = height - top - bottom;

    Range xr, yr;
    bool first = true;
    for (const SvgSeries& s : series)
        for (const auto& [x, y] : s.points) {
            if (first) {
                xr.lo = xr.hi = x;
                yr.lo = yr.hi = y;
                first = false;
            }
            xr.lo = std::min(xr.lo, x);
            xr.hi = std::max(xr.hi, x);
            yr.lo = std::min(yr.lo, y);
            yr.hi = std::max(yr.hi, y);
        }
    xr.widen();
    yr.widen();

    auto px = [&](double x) { return left + (x - xr.lo) / (xr.hi - xr.lo) * plot_w; };
    auto py = [&](double y) { return top + (yr.hi - y) / (yr.hi - yr.lo) * plot_h; };

    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << plot_w << "\" height=\""
        << plot_h << "\" fill=\"none\" stroke=\"black\"/>\n";

    constexpr int ticks = 5;
    for (int i = 0; i <= ticks; ++i) {
        const double x = xr.lo + (xr.hi - xr.lo) * i / ticks;
        const double y = yr.lo + (yr.hi - yr.lo) * i / ticks;
        svg << "<line x1=\"" << px(x) << "\" y1=\"" << top + plot_h << "\" x2=\"" << px(x)
            << "\" y2=\"" << top + plot_h + 6 << "\" stroke=\"black\"/>\n";
        svg << "<text x=\"" << px(x) << "\" y=\"" << top + plot_h + 22
            << "\" font-size=\"12\" text-anchor=\"middle\">" << svg_num(x) << "</text>\n";
        svg << "<line x1=\"" << left - 6 << "\" y1=\"" << py(y) << "\" x2=\"" << left
            << "\" y2=\"" << py(y) << "\" stroke=\"black\"/>\n";
        svg << "<text x=\"" << left - 10 << "\" y=\"" << py(y) + 4
            << "\" font-size=\"12\" text-anchor=\"end\">" << svg_num(y) << "</text>\n";
    }
    svg << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 14
        << "\" font-size=\"14\" text-anchor=\"middle\">" << x_label << "</text>\n";
    svg << "<text x=\"18\" y=\"" << top + plot_h / 2
        << "\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
        << top + plot_h / 2 << ")\">" << y_label << "</text>\n";

    int color_index = 0;
    int legend_y = top + 16;
    for (const SvgSeries& s : series) {
        const char* color = colors[color_index++ % 5];
        svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.2\" points=\"";
        for (const auto& [x, y] : s.points) svg << svg_num(px(x)) << "," << svg_num(py(y)) << " ";
        svg << "\"/>\n";
        svg << "<text x=\"" << left + 10 << "\" y=\"" << legend_y << "\" font-size=\"12\" fill=\""
            << color << "\">" << s.name << "</text>\n";
        legend_y += 16;
    }
    svg << "</svg>\n";
    write_file_atomic(path, svg.str());
}

}  // namespace cascade
