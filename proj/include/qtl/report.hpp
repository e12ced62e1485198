#pragma once

// CSV tables (RFC 4180, '.' decimal, 12 significant digits) and minimal
// static SVG line charts. Charts are rendered from CSV text only, so every
// figure can be regenerated from its table.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "qtl/errors.hpp"

namespace qtl {

inline std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

inline std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add_row(const std::vector<double>& values) {
        std::vector<std::string> r;
        for (double v : values) r.push_back(format_number(v));
        rows.push_back(std::move(r));
    }

    std::string str() const {
        std::string out;
        auto line = [&](const std::vector<std::string>& fields) {
            for (std::size_t i = 0; i < fields.size(); ++i) {
                if (i) out += ',';
                out += csv_escape(fields[i]);
            }
            out += "\r\n";
        };
        line(header);
        for (const auto& r : rows) line(r);
        return out;
    }

    std::size_t column(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (header[i] == name) return i;
        }
        throw DimMismatch("csv: no column '" + name + "'");
    }

    std::vector<double> numbers(const std::string& name) const {
        const std::size_t c = column(name);
        std::vector<double> out;
        for (const auto& r : rows) out.push_back(std::stod(r.at(c)));
        return out;
    }
};

/// Parses RFC 4180 text (quoted fields, CRLF or LF line ends); first record is the header.
inline CsvTable parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool quoted = false, any = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = any = true;
        } else if (c == ',') {
            record.push_back(std::move(field));
            field.clear();
            any = true;
        } else if (c == '\n' || c == '\r') {
            if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
            if (any || !field.empty()) {
                record.push_back(std::move(field));
                records.push_back(std::move(record));
            }
            field.clear();
            record.clear();
            any = false;
        } else {
            field += c;
            any = true;
        }
    }
    if (any || !field.empty()) {
        record.push_back(std::move(field));
        records.push_back(std::move(record));
    }
    if (records.empty()) throw DimMismatch("csv: empty input");
    CsvTable t;
    t.header = std::move(records.front());
    t.rows.assign(std::make_move_iterator(records.begin() + 1), std::make_move_iterator(records.end()));
    return t;
}

// ---------------------------------------------------------------------------
// SVG line charts
// ---------------------------------------------------------------------------

struct ChartSeries {
    std::string label;
    std::vector<double> x, y;
    std::vector<double> lo, hi;  // optional band, same length as x
};

struct ChartPanel {
    std::string title, x_label, y_label;
    bool log2_x = false;
    std::vector<ChartSeries> series;
};

namespace detail {

inline std::string svg_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

inline const char* series_color(std::size_t i) {
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};
    return colors[i % 6];
}

inline std::string fmt_coord(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

}  // namespace detail

inline std::string render_svg(const std::vector<ChartPanel>& panels) {
    const double pw = 420, ph = 300, ml = 60, mr = 20, mt = 30, mb = 50;
    const double width = pw * static_cast<double>(std::max<std::size_t>(1, panels.size()));
    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << ph
      << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    for (std::size_t pi = 0; pi < panels.size(); ++pi) {
        const ChartPanel& p = panels[pi];
        const double ox = pw * static_cast<double>(pi);
        auto tx = [&](double x) { return p.log2_x ? std::log2(std::max(x, 1e-300)) : x; };
        double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
        for (const auto& s : p.series) {
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                x0 = std::min(x0, tx(s.x[i]));
                x1 = std::max(x1, tx(s.x[i]));
                y0 = std::min(y0, s.lo.empty() ? s.y[i] : s.lo[i]);
                y1 = std::max(y1, s.hi.empty() ? s.y[i] : s.hi[i]);
                y0 = std::min(y0, s.y[i]);
                y1 = std::max(y1, s.y[i]);
            }
        }
        if (!(x1 > x0)) { x0 -= 1; x1 += 1; }
        if (!(y1 > y0)) { y0 -= 0.5; y1 += 0.5; }
        y0 = std::min(y0, 0.0);
        const double left = ox + ml, right = ox + pw - mr, top = mt, bottom = ph - mb;
        auto px = [&](double x) { return left + (tx(x) - x0) / (x1 - x0) * (right - left); };
        auto py = [&](double y) { return bottom - (y - y0) / (y1 - y0) * (bottom - top); };

        o << "<g>\n<text x=\"" << detail::fmt_coord(0.5 * (left + right)) << "\" y=\"18\" text-anchor=\"middle\">"
          << detail::svg_escape(p.title) << "</text>\n";
        o << "<rect x=\"" << detail::fmt_coord(left) << "\" y=\"" << top << "\" width=\""
          << detail::fmt_coord(right - left) << "\" height=\"" << bottom - top
          << "\" fill=\"none\" stroke=\"#444\"/>\n";
        for (int t = 0; t <= 4; ++t) {
            const double yv = y0 + (y1 - y0) * t / 4.0;
            o << "<text x=\"" << detail::fmt_coord(left - 4) << "\" y=\"" << detail::fmt_coord(py(yv) + 4)
              << "\" text-anchor=\"end\">" << format_number(std::round(yv * 1000) / 1000) << "</text>\n";
        }
        std::vector<double> ticks;
        for (const auto& s : p.series) ticks.insert(ticks.end(), s.x.begin(), s.x.end());
        std::sort(ticks.begin(), ticks.end());
        ticks.erase(std::unique(ticks.begin(), ticks.end()), ticks.end());
        if (ticks.size() > 9) {
            std::vector<double> thin;
            for (std::size_t i = 0; i < ticks.size(); i += (ticks.size() + 8) / 9) thin.push_back(ticks[i]);
            ticks = thin;
        }
        for (double xv : ticks) {
            o << "<text x=\"" << detail::fmt_coord(px(xv)) << "\" y=\"" << detail::fmt_coord(bottom + 14)
              << "\" text-anchor=\"middle\">" << format_number(xv) << "</text>\n";
        }
        o << "<text x=\"" << detail::fmt_coord(0.5 * (left + right)) << "\" y=\"" << ph - 18
          << "\" text-anchor=\"middle\">" << detail::svg_escape(p.x_label) << "</text>\n";
        o << "<text transform=\"translate(" << detail::fmt_coord(ox + 14) << ","
          << detail::fmt_coord(0.5 * (top + bottom)) << ") rotate(-90)\" text-anchor=\"middle\">"
          << detail::svg_escape(p.y_label) << "</text>\n";

        for (std::size_t si = 0; si < p.series.size(); ++si) {
            const ChartSeries& s = p.series[si];
            const char* color = detail::series_color(si);
            if (!s.lo.empty() && !s.hi.empty()) {
                o << "<polygon fill=\"" << color << "\" fill-opacity=\"0.18\" stroke=\"none\" points=\"";
                for (std::size_t i = 0; i < s.x.size(); ++i) o << detail::fmt_coord(px(s.x[i])) << ',' << detail::fmt_coord(py(s.hi[i])) << ' ';
                for (std::size_t i = s.x.size(); i-- > 0;) o << detail::fmt_coord(px(s.x[i])) << ',' << detail::fmt_coord(py(s.lo[i])) << ' ';
                o << "\"/>\n";
            }
            o << "<polyline fill=\"none\" stroke-width=\"2\" stroke=\"" << color << "\" points=\"";
            for (std::size_t i = 0; i < s.x.size(); ++i) o << detail::fmt_coord(px(s.x[i])) << ',' << detail::fmt_coord(py(s.y[i])) << ' ';
            o << "\"/>\n";
            o << "<text x=\"" << detail::fmt_coord(right - 6) << "\" y=\"" << detail::fmt_coord(top + 14 + 13.0 * si)
              << "\" text-anchor=\"end\" fill=\"" << color << "\">" << detail::svg_escape(s.label) << "</text>\n";
        }
        o << "</g>\n";
    }
    o << "</svg>\n";
    return o.str();
}

/// Median + IQR panel and bound panel, one series per n_source.
inline std::string risk_curve_svg(const std::string& csv_text) {
    const CsvTable t = parse_csv(csv_text);
    const auto ns = t.numbers("n_source"), nt = t.numbers("n_target"), med = t.numbers("median"),
               q25 = t.numbers("q25"), q75 = t.numbers("q75"), bound = t.numbers("bound_value");
    std::map<double, std::pair<ChartSeries, ChartSeries>> by_source;
    for (std::size_t i = 0; i < ns.size(); ++i) {
        auto& [risk, b] = by_source[ns[i]];
        const std::string label = "N_S = " + format_number(ns[i]);
        risk.label = b.label = label;
        risk.x.push_back(nt[i]);
        risk.y.push_back(med[i]);
        risk.lo.push_back(q25[i]);
        risk.hi.push_back(q75[i]);
        b.x.push_back(nt[i]);
        b.y.push_back(bound[i]);
    }
    ChartPanel risk{"Transfer excess risk (median, IQR)", "target samples N_T", "excess risk", true, {}};
    ChartPanel bounds{"Evaluated bound", "target samples N_T", "bound", true, {}};
    for (auto& [k, v] : by_source) {
        risk.series.push_back(v.first);
        bounds.series.push_back(v.second);
    }
    return render_svg({risk, bounds});
}

inline std::string shift_sweep_svg(const std::string& csv_text) {
    const CsvTable t = parse_csv(csv_text);
    ChartSeries risk{"median", t.numbers("shift"), t.numbers("median"), t.numbers("q25"), t.numbers("q75")};
    ChartSeries bound{"bound", t.numbers("shift"), t.numbers("bound_value"), {}, {}};
    ChartSeries trace{"D_trace", t.numbers("shift"), t.numbers("dst_trace"), {}, {}};
    ChartSeries tv{"D_TV", t.numbers("shift"), t.numbers("dst_tv"), {}, {}};
    return render_svg({ChartPanel{"Transfer excess risk vs mean shift", "shift", "excess risk", false, {risk}},
                       ChartPanel{"Bound and dissimilarity", "shift", "value", false, {bound, trace, tv}}});
}

}  // namespace qtl
