#include "mdiqrng/counts_csv.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

namespace mdiqrng::io {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

[[noreturn]] void parse_error(int line_no, const std::string& what) {
    throw IoError("counts CSV line " + std::to_string(line_no) + ": " + what);
}

}  // namespace

decoy::CountsTable read_counts_csv(std::istream& in) {
    std::string line;
    int line_no = 0;
    if (!std::getline(in, line)) throw IoError("counts CSV: empty input");
    ++line_no;
    if (split_csv_line(line) != std::vector<std::string>{"probe", "intensity", "trials", "clicks"}) {
        parse_error(line_no, "expected header 'probe,intensity,trials,clicks'");
    }

    decoy::CountsTable t;
    std::array<std::array<bool, 2>, 4> seen{};
    int rows = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != 4) parse_error(line_no, "expected 4 fields");
        const auto probe = qmath::parse_probe(f[0]);
        if (!probe) parse_error(line_no, "unknown probe '" + f[0] + "'");
        decoy::IntensityLabel label;
        if (f[1] == "signal") {
            label = decoy::IntensityLabel::Signal;
        } else if (f[1] == "decoy") {
            label = decoy::IntensityLabel::Decoy;
        } else {
            parse_error(line_no, "unknown intensity '" + f[1] + "'");
        }
        std::int64_t trials = 0, clicks = 0;
        try {
            trials = std::stoll(f[2]);
            clicks = std::stoll(f[3]);
        } catch (const std::exception&) {
            parse_error(line_no, "trials/clicks must be integers");
        }
        if (trials < 0 || clicks < 0 || clicks > trials) {
            parse_error(line_no, "need 0 <= clicks <= trials");
        }
        auto& was = seen[qmath::probe_index(*probe)][static_cast<int>(label)];
        if (was) parse_error(line_no, "duplicate (probe, intensity) row");
        was = true;
        t.at(*probe, label) = {clicks, trials};
        ++rows;
    }
    if (rows != 8) {
        throw IoError("counts CSV: expected exactly 8 data rows, got " + std::to_string(rows));
    }
    return t;
}

decoy::CountsTable read_counts_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open counts file: " + path);
    return read_counts_csv(in);
}

std::string counts_to_csv(const decoy::CountsTable& t) {
    std::ostringstream out;
    out << "probe,intensity,trials,clicks\n";
    for (qmath::ProbeId j : qmath::kAllProbes) {
        for (auto l : {decoy::IntensityLabel::Signal, decoy::IntensityLabel::Decoy}) {
            const decoy::CountsCell& c = t.at(j, l);
            out << qmath::probe_name(j) << ',' << decoy::intensity_name(l) << ',' << c.trials
                << ',' << c.clicks << '\n';
        }
    }
    return out.str();
}

void write_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open for writing: " + tmp);
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw IoError("write failed: " + tmp);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("rename failed: " + tmp + " -> " + path + ": " + ec.message());
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace mdiqrng::io
