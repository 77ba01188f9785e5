#include "covcpd/io.hpp"

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "covcpd/errors.hpp"

namespace covcpd {

namespace {

constexpr char kMagic[8] = {'c', 'o', 'v', 'c', 'p', 'd', '0', '1'};

ObservationMatrix wrap_matrix(std::int64_t n, std::int64_t p, std::vector<double> data,
                              const std::filesystem::path& path) {
    if (n < 2 || p < 1)
        throw IoError(path.string() + ": need at least 2 rows and 1 column");
    try {
        return ObservationMatrix(n, static_cast<int>(p), std::move(data));
    } catch (const ContractError& e) {
        throw IoError(path.string() + ": " + e.what());
    }
}

}  // namespace

ObservationMatrix load_matrix_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());

    std::vector<double> data;
    std::int64_t rows = 0;
    std::int64_t cols = -1;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        // skip blank lines
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        std::int64_t this_cols = 0;
        std::size_t pos = 0;
        while (pos <= line.size()) {
            std::size_t comma = line.find(',', pos);
            if (comma == std::string::npos) comma = line.size();
            const std::string field = line.substr(pos, comma - pos);
            char* end = nullptr;
            const double v = std::strtod(field.c_str(), &end);
            while (end && *end == ' ') ++end;
            if (end == field.c_str() || (end && *end != '\0'))
                throw IoError(path.string() + ": cannot parse numeric field '" + field +
                              "' on line " + std::to_string(rows + 1));
            data.push_back(v);
            ++this_cols;
            pos = comma + 1;
            if (comma == line.size()) break;
        }
        if (cols < 0)
            cols = this_cols;
        else if (this_cols != cols)
            throw IoError(path.string() + ": inconsistent column count on line " +
                          std::to_string(rows + 1));
        ++rows;
    }
    if (rows == 0) throw IoError(path.string() + ": empty input");
    return wrap_matrix(rows, cols, std::move(data), path);
}

void save_matrix_csv(const std::filesystem::path& path, const ObservationMatrix& x) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    char buf[40];
    for (std::int64_t i = 0; i < x.n(); ++i) {
        auto r = x.row(i);
        for (int j = 0; j < x.p(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", r[static_cast<std::size_t>(j)]);
            out << buf;
            if (j + 1 < x.p()) out << ',';
        }
        out << '\n';
    }
    if (!out) throw IoError("write failed: " + path.string());
}

ObservationMatrix load_matrix_binary(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, kMagic, 8) != 0)
        throw IoError(path.string() + ": bad magic (not a covcpd binary matrix)");
    std::int64_t n = 0, p = 0;
    in.read(reinterpret_cast<char*>(&n), sizeof n);
    in.read(reinterpret_cast<char*>(&p), sizeof p);
    if (!in || n < 0 || p < 0 || p > (1 << 20))
        throw IoError(path.string() + ": bad header");
    std::vector<double> data(static_cast<std::size_t>(n) * static_cast<std::size_t>(p));
    in.read(reinterpret_cast<char*>(data.data()),
            static_cast<std::streamsize>(data.size() * sizeof(double)));
    if (!in) throw IoError(path.string() + ": truncated payload");
    return wrap_matrix(n, p, std::move(data), path);
}

void save_matrix_binary(const std::filesystem::path& path, const ObservationMatrix& x) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out.write(kMagic, 8);
    const std::int64_t n = x.n(), p = x.p();
    out.write(reinterpret_cast<const char*>(&n), sizeof n);
    out.write(reinterpret_cast<const char*>(&p), sizeof p);
    out.write(reinterpret_cast<const char*>(x.data().data()),
              static_cast<std::streamsize>(x.data().size() * sizeof(double)));
    if (!out) throw IoError("write failed: " + path.string());
}

ObservationMatrix load_matrix(const std::filesystem::path& path) {
    if (path.extension() == ".bin") return load_matrix_binary(path);
    return load_matrix_csv(path);
}

std::string segment_model_to_json(const SegmentModel& model) {
    nlohmann::json j;
    j["n"] = model.n();
    j["change_points"] = model.change_points();
    nlohmann::json sigmas = nlohmann::json::array();
    for (const SymMat& s : model.sigmas()) {
        nlohmann::json rows = nlohmann::json::array();
        for (int i = 0; i < s.dim(); ++i) {
            nlohmann::json row = nlohmann::json::array();
            for (int jj = 0; jj < s.dim(); ++jj) row.push_back(s(i, jj));
            rows.push_back(std::move(row));
        }
        sigmas.push_back(std::move(rows));
    }
    j["sigmas"] = std::move(sigmas);
    return j.dump();
}

SegmentModel segment_model_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("segment model JSON: ") + e.what());
    }
    try {
        const std::int64_t n = j.at("n").get<std::int64_t>();
        std::vector<std::int64_t> cps = j.at("change_points").get<std::vector<std::int64_t>>();
        std::vector<SymMat> sigmas;
        for (const auto& rows : j.at("sigmas")) {
            const int p = static_cast<int>(rows.size());
            SymMat s(p);
            for (int i = 0; i < p; ++i)
                for (int jj = i; jj < p; ++jj)
                    s.set(i, jj, rows.at(static_cast<std::size_t>(i))
                                     .at(static_cast<std::size_t>(jj))
                                     .get<double>());
            sigmas.push_back(std::move(s));
        }
        return SegmentModel(n, std::move(cps), std::move(sigmas));
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("segment model JSON: ") + e.what());
    }
}

}  // namespace covcpd
