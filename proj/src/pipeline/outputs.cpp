#include "qsv/pipeline/outputs.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>

#include <unistd.h>

#include "qsv/errors.hpp"
#include "qsv/format.hpp"
#include "qsv/version.hpp"

namespace qsv::pipeline {

using nlohmann::ordered_json;

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    static std::atomic<unsigned> counter{0};
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp." + std::to_string(::getpid()) + "." + std::to_string(counter++);
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out << content;
        out.flush();
        if (!out) {
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            throw DataError("cannot write " + path.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

std::string provenance_line(const std::string& config_digest) {
    return std::string(kToolkitName) + " " + kToolkitVersion + " config=" + config_digest;
}

ordered_json report_header(const std::string& config_digest) {
    ordered_json doc;
    doc["toolkit"] = kToolkitName;
    doc["version"] = kToolkitVersion;
    doc["config_digest"] = config_digest;
    return doc;
}

ordered_json optional_number(const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); }

std::string square_csv(const std::vector<std::string>& names, const std::vector<std::optional<double>>& values,
                       const std::string& comment) {
    std::string out;
    if (!comment.empty()) out += "# " + comment + "\n";
    out += "measure";
    for (const auto& n : names) out += "," + n;
    out += "\n";
    const std::size_t k = names.size();
    for (std::size_t i = 0; i < k; ++i) {
        out += names[i];
        for (std::size_t j = 0; j < k; ++j) out += "," + format_cell(values[i * k + j]);
        out += "\n";
    }
    return out;
}

std::string loadings_csv(const stats::FactorSolution& s, const std::string& comment) {
    std::string out;
    if (!comment.empty()) out += "# " + comment + "\n";
    out += "measure";
    for (int f = 1; f <= s.n_factors; ++f) out += ",factor" + std::to_string(f);
    out += ",communality,uniqueness\n";
    for (std::size_t i = 0; i < s.names.size(); ++i) {
        out += s.names[i];
        const auto row = static_cast<Eigen::Index>(i);
        for (Eigen::Index f = 0; f < s.loadings.cols(); ++f) out += "," + format_double(s.loadings(row, f));
        out += "," + format_double(s.communalities[i]) + "," + format_double(s.uniquenesses[i]) + "\n";
    }
    return out;
}

namespace {

std::string escape_xml(const std::string& s) {
    std::string out;
    for (const char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

// Blue for -1, white for 0, red for +1.
std::string cell_color(double r) {
    const double t = std::clamp(std::abs(r), 0.0, 1.0);
    const auto fade = static_cast<int>(std::lround(255.0 * (1.0 - t)));
    char buf[8];
    if (r >= 0) {
        std::snprintf(buf, sizeof buf, "#ff%02x%02x", fade, fade);
    } else {
        std::snprintf(buf, sizeof buf, "#%02x%02xff", fade, fade);
    }
    return buf;
}

}  // namespace

std::string heatmap_svg(const stats::CorrelationMatrix& m, const std::string& comment) {
    constexpr int kCell = 150;
    constexpr int kMargin = 170;
    const int k = static_cast<int>(m.size());
    const int size = kMargin + k * kCell + 10;
    std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<!-- " + escape_xml(comment) + " -->\n";
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(size) + "\" height=\"" +
           std::to_string(size) + "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    out += "<title>" + std::string(stats::to_string(m.method)) + " correlation</title>\n";
    for (int i = 0; i < k; ++i) {
        const std::string name = escape_xml(m.names[static_cast<std::size_t>(i)]);
        const int centre = kMargin + i * kCell + kCell / 2;
        out += "<text x=\"" + std::to_string(kMargin - 6) + "\" y=\"" + std::to_string(centre) +
               "\" text-anchor=\"end\" dominant-baseline=\"middle\">" + name + "</text>\n";
        out += "<text x=\"" + std::to_string(centre) + "\" y=\"" + std::to_string(kMargin - 6) +
               "\" text-anchor=\"middle\">" + name + "</text>\n";
    }
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) {
            const auto v = m.at(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
            const int x = kMargin + j * kCell;
            const int y = kMargin + i * kCell;
            out += "<rect x=\"" + std::to_string(x) + "\" y=\"" + std::to_string(y) + "\" width=\"" +
                   std::to_string(kCell) + "\" height=\"" + std::to_string(kCell) + "\" fill=\"" +
                   (v ? cell_color(*v) : std::string("#dddddd")) + "\" stroke=\"#ffffff\"/>\n";
            out += "<text x=\"" + std::to_string(x + kCell / 2) + "\" y=\"" + std::to_string(y + kCell / 2) +
                   "\" text-anchor=\"middle\" dominant-baseline=\"middle\">" + format_cell(v) + "</text>\n";
        }
    }
    out += "</svg>\n";
    return out;
}

}  // namespace qsv::pipeline
