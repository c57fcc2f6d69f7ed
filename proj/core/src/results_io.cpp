#include "hf/harness.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace hf {

using nlohmann::json;

namespace {

const char* kCsvHeader =
    "snr_db,velocity_kmh,receiver,channel,detector,coding,csi,"
    "ber_otfs_raw,ber_ofdm_raw,ber_otfs_coded,ber_ofdm_coded,"
    "bits_otfs_raw,bits_ofdm_raw,bits_otfs_coded,bits_ofdm_coded,"
    "err_otfs_raw,err_ofdm_raw,err_otfs_coded,err_ofdm_coded,frames,seed";

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

json record_to_json(const BerRecord& r) {
    json j;
    j["snr_db"] = r.snr_db;
    j["velocity_kmh"] = r.velocity_kmh;
    j["receiver"] = r.receiver;
    j["channel"] = r.channel;
    j["detector"] = r.detector;
    j["coding"] = r.coding;
    j["csi"] = r.csi;
    j["ber_otfs_raw"] = r.ber_otfs_raw;
    j["ber_ofdm_raw"] = r.ber_ofdm_raw;
    j["ber_otfs_coded"] = r.ber_otfs_coded;
    j["ber_ofdm_coded"] = r.ber_ofdm_coded;
    j["bits_otfs_raw"] = r.bits_otfs_raw;
    j["bits_ofdm_raw"] = r.bits_ofdm_raw;
    j["bits_otfs_coded"] = r.bits_otfs_coded;
    j["bits_ofdm_coded"] = r.bits_ofdm_coded;
    j["err_otfs_raw"] = r.err_otfs_raw;
    j["err_ofdm_raw"] = r.err_ofdm_raw;
    j["err_otfs_coded"] = r.err_otfs_coded;
    j["err_ofdm_coded"] = r.err_ofdm_coded;
    j["frames"] = r.frames;
    j["seed"] = r.seed;
    return j;
}

double json_double(const json& j, const char* key) {
    const auto& v = j.at(key);
    if (v.is_null()) return std::numeric_limits<double>::quiet_NaN();
    return v.get<double>();
}

BerRecord record_from_json(const json& j) {
    BerRecord r;
    r.snr_db = json_double(j, "snr_db");
    r.velocity_kmh = json_double(j, "velocity_kmh");
    r.receiver = j.at("receiver").get<std::string>();
    r.channel = j.at("channel").get<std::string>();
    r.detector = j.value("detector", "");
    r.coding = j.value("coding", "");
    r.csi = j.value("csi", "");
    r.ber_otfs_raw = json_double(j, "ber_otfs_raw");
    r.ber_ofdm_raw = json_double(j, "ber_ofdm_raw");
    r.ber_otfs_coded = json_double(j, "ber_otfs_coded");
    r.ber_ofdm_coded = json_double(j, "ber_ofdm_coded");
    r.bits_otfs_raw = j.at("bits_otfs_raw").get<std::uint64_t>();
    r.bits_ofdm_raw = j.at("bits_ofdm_raw").get<std::uint64_t>();
    r.bits_otfs_coded = j.at("bits_otfs_coded").get<std::uint64_t>();
    r.bits_ofdm_coded = j.at("bits_ofdm_coded").get<std::uint64_t>();
    r.err_otfs_raw = j.at("err_otfs_raw").get<std::uint64_t>();
    r.err_ofdm_raw = j.at("err_ofdm_raw").get<std::uint64_t>();
    r.err_otfs_coded = j.at("err_otfs_coded").get<std::uint64_t>();
    r.err_ofdm_coded = j.at("err_ofdm_coded").get<std::uint64_t>();
    r.frames = j.at("frames").get<std::uint64_t>();
    r.seed = j.at("seed").get<std::uint64_t>();
    return r;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
}

}  // namespace

void emit_results(const std::vector<BerRecord>& records, ResultFormat fmt, const std::string& path) {
    if (records.empty()) throw std::invalid_argument("emit_results: no records");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("emit_results: cannot write " + path);
    if (fmt == ResultFormat::csv) {
        out << kCsvHeader << "\n";
        for (const auto& r : records) {
            out << fmt_double(r.snr_db) << ',' << fmt_double(r.velocity_kmh) << ',' << r.receiver
                << ',' << r.channel << ',' << r.detector << ',' << r.coding << ',' << r.csi << ','
                << fmt_double(r.ber_otfs_raw) << ',' << fmt_double(r.ber_ofdm_raw) << ','
                << fmt_double(r.ber_otfs_coded) << ',' << fmt_double(r.ber_ofdm_coded) << ','
                << r.bits_otfs_raw << ',' << r.bits_ofdm_raw << ',' << r.bits_otfs_coded << ','
                << r.bits_ofdm_coded << ',' << r.err_otfs_raw << ',' << r.err_ofdm_raw << ','
                << r.err_otfs_coded << ',' << r.err_ofdm_coded << ',' << r.frames << ',' << r.seed
                << "\n";
        }
    } else {
        json arr = json::array();
        for (const auto& r : records) arr.push_back(record_to_json(r));
        out << arr.dump(2) << "\n";
    }
}

std::vector<BerRecord> load_results(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_results: cannot open " + path);
    std::vector<BerRecord> records;
    if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") {
        json arr;
        in >> arr;
        for (const auto& j : arr) records.push_back(record_from_json(j));
        return records;
    }
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("load_results: empty file");
    if (line != kCsvHeader) throw std::runtime_error("load_results: unexpected CSV header");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != 21) throw std::runtime_error("load_results: malformed CSV row");
        BerRecord r;
        r.snr_db = std::stod(cells[0]);
        r.velocity_kmh = std::stod(cells[1]);
        r.receiver = cells[2];
        r.channel = cells[3];
        r.detector = cells[4];
        r.coding = cells[5];
        r.csi = cells[6];
        r.ber_otfs_raw = std::stod(cells[7]);
        r.ber_ofdm_raw = std::stod(cells[8]);
        r.ber_otfs_coded = std::stod(cells[9]);
        r.ber_ofdm_coded = std::stod(cells[10]);
        r.bits_otfs_raw = std::stoull(cells[11]);
        r.bits_ofdm_raw = std::stoull(cells[12]);
        r.bits_otfs_coded = std::stoull(cells[13]);
        r.bits_ofdm_coded = std::stoull(cells[14]);
        r.err_otfs_raw = std::stoull(cells[15]);
        r.err_ofdm_raw = std::stoull(cells[16]);
        r.err_otfs_coded = std::stoull(cells[17]);
        r.err_ofdm_coded = std::stoull(cells[18]);
        r.frames = std::stoull(cells[19]);
        r.seed = std::stoull(cells[20]);
        records.push_back(std::move(r));
    }
    return records;
}

std::string rebin_for_plot(const std::vector<BerRecord>& records, const std::string& metric) {
    auto metric_of = [&](const BerRecord& r) -> double {
        if (metric == "ber_otfs_raw") return r.ber_otfs_raw;
        if (metric == "ber_ofdm_raw") return r.ber_ofdm_raw;
        if (metric == "ber_otfs_coded") return r.ber_otfs_coded;
        if (metric == "ber_ofdm_coded") return r.ber_ofdm_coded;
        throw std::invalid_argument("rebin_for_plot: unknown metric '" + metric + "'");
    };

    std::set<double> snrs;
    std::map<std::string, std::map<double, double>> series;
    for (const auto& r : records) {
        const double m = metric_of(r);
        if (std::isnan(m)) continue;
        std::ostringstream label;
        label << r.receiver << '|' << r.channel << '|' << fmt_double(r.velocity_kmh) << "kmh|"
              << r.detector << '|' << r.csi << '|' << r.coding;
        series[label.str()][r.snr_db] = m;
        snrs.insert(r.snr_db);
    }

    std::ostringstream out;
    out << "snr_db";
    for (const auto& [label, _] : series) out << ',' << label;
    out << "\n";
    for (double snr : snrs) {
        out << fmt_double(snr);
        for (const auto& [_, pts] : series) {
            auto it = pts.find(snr);
            out << ',';
            if (it != pts.end()) out << fmt_double(it->second);
        }
        out << "\n";
    }
    return out.str();
}

}  // namespace hf
