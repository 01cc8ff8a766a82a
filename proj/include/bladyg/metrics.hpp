#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "bladyg/runtime.hpp"

namespace bladyg {

// One benchmark row. Times are wall-clock milliseconds; message counts are
// the portable proxy for cross-worker traffic, since absolute timings are
// machine-bound.
struct MetricsRecord {
  std::string dataset;
  std::string algorithm;
  std::string partitioner;
  int workers = 0;
  std::string scenario;  // inter | intra | file | none
  std::string strategy;  // incremental | naive | none
  int repeat = 0;
  std::uint64_t seed = 0;
  double pt_ms = 0.0;   // partitioning time
  double ut_ms = 0.0;   // update time (whole stream)
  double ait_ms = 0.0;  // mean per-insertion time
  double adt_ms = 0.0;  // mean per-deletion time
  std::uint64_t msg_m2w = 0;
  std::uint64_t msg_w2m = 0;
  std::uint64_t msg_w2w = 0;
  std::uint64_t mutations = 0;  // assignment writes (partition benchmarks)

  static const char* csv_header() {
    return "dataset,algorithm,partitioner,workers,scenario,strategy,repeat,seed,"
           "pt_ms,ut_ms,ait_ms,adt_ms,msg_m2w,msg_w2m,msg_w2w,mutations";
  }

  std::string csv_row() const {
    std::ostringstream os;
    os << dataset << ',' << algorithm << ',' << partitioner << ',' << workers << ',' << scenario
       << ',' << strategy << ',' << repeat << ',' << seed << ',' << pt_ms << ',' << ut_ms << ','
       << ait_ms << ',' << adt_ms << ',' << msg_m2w << ',' << msg_w2m << ',' << msg_w2w << ','
       << mutations;
    return os.str();
  }

  void fill_from(const JobMetrics& jm) {
    msg_m2w = jm.sent_m2w;
    msg_w2m = jm.sent_w2m;
    msg_w2w = jm.sent_w2w;
    ut_ms = jm.total_ms;
    ait_ms = jm.inserts ? jm.insert_ms / static_cast<double>(jm.inserts) : 0.0;
    adt_ms = jm.deletes ? jm.delete_ms / static_cast<double>(jm.deletes) : 0.0;
  }
};

// Appends a row, writing the header first when the file is new or empty.
inline void append_metrics(const MetricsRecord& rec, const std::filesystem::path& path) {
  bool need_header = !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
  std::ofstream os(path, std::ios::app);
  if (!os) throw Error(ErrorCode::ParseError, "cannot write " + path.string());
  if (need_header) os << MetricsRecord::csv_header() << "\n";
  os << rec.csv_row() << "\n";
}

}  // namespace bladyg
