#include "asni/metrics.hpp"

#include <cstdio>
#include <fstream>

#include "asni/errors.hpp"

namespace asni {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

std::string metrics_csv_header() {
    return "epoch,train_loss,test_accuracy,p,tau_g,nonzeros,lr";
}

std::string metrics_csv_row(const MetricsRecord& r) {
    std::string row = std::to_string(r.epoch);
    row += "," + format_double(r.train_loss);
    row += "," + format_double(r.test_accuracy);
    row += "," + format_double(r.p);
    row += "," + format_double(r.tau_g);
    row += "," + std::to_string(r.nonzeros);
    row += "," + format_double(r.lr);
    return row;
}

void write_metrics_csv(const std::string& path, const std::vector<MetricsRecord>& records) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError(DataError::Kind::io, "cannot write '" + path + "'");
    out << metrics_csv_header() << "\n";
    for (const auto& r : records) out << metrics_csv_row(r) << "\n";
}

} // namespace asni
