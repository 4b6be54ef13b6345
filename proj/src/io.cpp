#include "lqg/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace lqg {

using nlohmann::json;

std::string fmt_double(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace {

std::string provenance_string(const FieldGrid& f) {
    switch (f.provenance) {
        case Provenance::raw_gff: return "raw-gff";
        case Provenance::mollified: return "mollified(" + fmt_double(f.mollification_eps) + ")";
        case Provenance::surgered: return "surgered";
    }
    return "raw-gff";
}

void parse_provenance(const std::string& s, FieldGrid& f) {
    if (s.rfind("mollified(", 0) == 0) {
        f.provenance = Provenance::mollified;
        f.mollification_eps = std::stod(s.substr(10, s.size() - 11));
    } else if (s == "surgered") {
        f.provenance = Provenance::surgered;
    } else {
        f.provenance = Provenance::raw_gff;
    }
}

json grid_header(const GridSpec& spec) {
    json h;
    h["side_count"] = spec.side_count;
    h["mesh"] = spec.mesh;
    h["origin_offset"] = {spec.origin_offset.x, spec.origin_offset.y};
    return h;
}

GridSpec grid_from_header(const json& h) {
    GridSpec spec;
    spec.side_count = h.at("side_count").get<int>();
    spec.mesh = h.at("mesh").get<double>();
    spec.origin_offset = {h.at("origin_offset")[0].get<double>(),
                          h.at("origin_offset")[1].get<double>()};
    spec.validate();
    return spec;
}

json read_header_line(std::istream& in, const std::string& what) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(what + ": missing header line");
    return json::parse(line);
}

}  // namespace

void write_fgrid(const std::string& path, const FieldGrid& field) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_fgrid: cannot open " + path);
    json h = grid_header(field.spec);
    h["seed"] = field.seed;
    h["provenance"] = provenance_string(field);
    h["normalization"] =
        field.normalization == Normalization::zero_circle_average ? "zero-circle-average" : "none";
    out << h.dump() << '\n';
    out.write(reinterpret_cast<const char*>(field.values.data()),
              std::streamsize(field.values.size() * sizeof(double)));
    if (!out) throw std::runtime_error("write_fgrid: write failed for " + path);
}

FieldGrid read_fgrid(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_fgrid: cannot open " + path);
    json h = read_header_line(in, "read_fgrid");
    FieldGrid f;
    f.spec = grid_from_header(h);
    f.seed = h.at("seed").get<std::uint64_t>();
    parse_provenance(h.at("provenance").get<std::string>(), f);
    f.normalization = h.at("normalization").get<std::string>() == "zero-circle-average"
                          ? Normalization::zero_circle_average
                          : Normalization::none;
    f.values.resize(f.spec.vertex_count());
    in.read(reinterpret_cast<char*>(f.values.data()),
            std::streamsize(f.values.size() * sizeof(double)));
    if (!in) throw std::runtime_error("read_fgrid: truncated value array in " + path);
    return f;
}

void write_dfield(const std::string& path, const MetricField& mf) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_dfield: cannot open " + path);
    json h = grid_header(mf.spec);
    h["source"] = mf.source;
    out << h.dump() << '\n';
    out.write(reinterpret_cast<const char*>(mf.distances.data()),
              std::streamsize(mf.distances.size() * sizeof(double)));
    out.write(reinterpret_cast<const char*>(mf.predecessors.data()),
              std::streamsize(mf.predecessors.size() * sizeof(VertexId)));
    if (!out) throw std::runtime_error("write_dfield: write failed for " + path);
}

MetricField read_dfield(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_dfield: cannot open " + path);
    json h = read_header_line(in, "read_dfield");
    MetricField mf;
    mf.spec = grid_from_header(h);
    mf.source = h.at("source").get<VertexId>();
    mf.distances.resize(mf.spec.vertex_count());
    mf.predecessors.resize(mf.spec.vertex_count());
    in.read(reinterpret_cast<char*>(mf.distances.data()),
            std::streamsize(mf.distances.size() * sizeof(double)));
    in.read(reinterpret_cast<char*>(mf.predecessors.data()),
            std::streamsize(mf.predecessors.size() * sizeof(VertexId)));
    if (!in) throw std::runtime_error("read_dfield: truncated arrays in " + path);
    return mf;
}

CsvWriter::CsvWriter(const std::string& path) {
    auto* f = new std::ofstream(path, std::ios::binary);
    if (!*f) {
        delete f;
        throw std::runtime_error("CsvWriter: cannot open " + path);
    }
    out_ = f;
}

CsvWriter::~CsvWriter() { close(); }

void CsvWriter::row(const std::vector<std::string>& cells) {
    auto* f = static_cast<std::ofstream*>(out_);
    if (!f) throw std::runtime_error("CsvWriter: already closed");
    for (std::size_t k = 0; k < cells.size(); k++) {
        if (k) *f << ',';
        *f << cells[k];
    }
    *f << '\n';
}

void CsvWriter::close() {
    auto* f = static_cast<std::ofstream*>(out_);
    if (f) {
        f->close();
        delete f;
        out_ = nullptr;
    }
}

namespace {

constexpr int kW = 640, kH = 480, kMargin = 60;

std::string fmt3(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, 3);
    return std::string(buf, res.ptr);
}

void svg_open(std::ostream& out, const std::string& title) {
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
        << "\">\n";
    out << "<rect width=\"" << kW << "\" height=\"" << kH << "\" fill=\"white\"/>\n";
    out << "<text x=\"" << kW / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
        << title << "</text>\n";
    out << "<line x1=\"" << kMargin << "\" y1=\"" << kH - kMargin << "\" x2=\"" << kW - kMargin
        << "\" y2=\"" << kH - kMargin << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << kMargin << "\" y1=\"" << kH - kMargin << "\" x2=\"" << kMargin
        << "\" y2=\"" << kMargin << "\" stroke=\"black\"/>\n";
}

}  // namespace

void svg_loglog(const std::string& path, const std::string& title,
                const std::vector<double>& xs, const std::vector<double>& ys, double slope,
                double stderr_, int window_lo, int window_hi) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("svg_loglog: cannot open " + path);
    svg_open(out, title);
    if (!xs.empty() && xs.size() == ys.size()) {
        double lx0 = 1e300, lx1 = -1e300, ly0 = 1e300, ly1 = -1e300;
        std::vector<std::pair<double, double>> pts;
        for (std::size_t k = 0; k < xs.size(); k++) {
            if (!(xs[k] > 0.0) || !(ys[k] > 0.0)) continue;
            double lx = std::log10(xs[k]), ly = std::log10(ys[k]);
            pts.emplace_back(lx, ly);
            lx0 = std::min(lx0, lx);
            lx1 = std::max(lx1, lx);
            ly0 = std::min(ly0, ly);
            ly1 = std::max(ly1, ly);
        }
        if (!pts.empty()) {
            if (lx1 - lx0 < 1e-12) lx1 = lx0 + 1.0;
            if (ly1 - ly0 < 1e-12) ly1 = ly0 + 1.0;
            auto px = [&](double lx) {
                return kMargin + (lx - lx0) / (lx1 - lx0) * (kW - 2 * kMargin);
            };
            auto py = [&](double ly) {
                return kH - kMargin - (ly - ly0) / (ly1 - ly0) * (kH - 2 * kMargin);
            };
            for (std::size_t k = 0; k < pts.size(); k++) {
                bool in_win = int(k) >= window_lo && int(k) <= window_hi;
                out << "<circle cx=\"" << fmt3(px(pts[k].first)) << "\" cy=\""
                    << fmt3(py(pts[k].second)) << "\" r=\"4\" fill=\""
                    << (in_win ? "steelblue" : "lightgray") << "\"/>\n";
            }
            out << "<text x=\"" << kMargin + 8 << "\" y=\"" << kMargin + 8
                << "\" font-size=\"14\">slope=" << fmt_double(slope)
                << " stderr=" << fmt_double(stderr_) << "</text>\n";
            out << "<text x=\"" << kW / 2 << "\" y=\"" << kH - 16
                << "\" text-anchor=\"middle\" font-size=\"12\">log10 range x: [" << fmt3(lx0)
                << ", " << fmt3(lx1) << "] y: [" << fmt3(ly0) << ", " << fmt3(ly1)
                << "]</text>\n";
        }
    }
    out << "</svg>\n";
}

void svg_histogram(const std::string& path, const std::string& title,
                   const std::vector<std::string>& labels, const std::vector<double>& counts) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("svg_histogram: cannot open " + path);
    svg_open(out, title);
    if (!labels.empty() && labels.size() == counts.size()) {
        double peak = 1.0;
        for (double c : counts) peak = std::max(peak, c);
        double bw = double(kW - 2 * kMargin) / double(labels.size());
        for (std::size_t k = 0; k < labels.size(); k++) {
            double h = counts[k] / peak * (kH - 2 * kMargin);
            double x = kMargin + bw * double(k);
            out << "<rect x=\"" << fmt3(x + 0.1 * bw) << "\" y=\"" << fmt3(kH - kMargin - h)
                << "\" width=\"" << fmt3(0.8 * bw) << "\" height=\"" << fmt3(h)
                << "\" fill=\"steelblue\"/>\n";
            out << "<text x=\"" << fmt3(x + 0.5 * bw) << "\" y=\"" << kH - kMargin + 16
                << "\" text-anchor=\"middle\" font-size=\"11\">" << labels[k] << "</text>\n";
            out << "<text x=\"" << fmt3(x + 0.5 * bw) << "\" y=\"" << fmt3(kH - kMargin - h - 4)
                << "\" text-anchor=\"middle\" font-size=\"11\">" << fmt_double(counts[k])
                << "</text>\n";
        }
    }
    out << "</svg>\n";
}

}  // namespace lqg
