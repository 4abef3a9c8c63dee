#include <fstream>

#include "contactlab/error.hpp"
#include "contactlab/io/experiment.hpp"
#include "contactlab/io/field_io.hpp"
#include "contactlab/parallel.hpp"

namespace contactlab {
namespace {

void write_text(const std::filesystem::path& p, const std::string& s) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("output_dir", "cannot write " + p.string());
  out << s;
  if (!out) throw ValidationError("output_dir", "write to " + p.string() + " failed");
}

std::string csv_cell(const Json& v) {
  switch (v.type()) {
    case Json::value_t::number_float: {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
      return buf;
    }
    case Json::value_t::string: return v.get<std::string>();
    case Json::value_t::null: return "";
    default: return v.dump();
  }
}

}  // namespace

void emit_report(const RunReport& report, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ValidationError("output_dir", "cannot create " + dir.string() + ": " + ec.message());

  Json j = Json::object();
  j["command"] = report.config_echo.value("command", "");
  j["status"] = report.status;
  j["config_echo"] = report.config_echo;
  j["results"] = report.results;
  j["provenance"] = report.provenance;
  Json files = Json::array();
  for (const auto& t : report.tables) files.push_back(t.name + ".csv");
  for (const auto& f : report.fields) files.push_back(f.name + ".fld");
  j["provenance"]["files"] = files;
  j["provenance"]["timing_file"] = "timing.json";
  j["warnings"] = Json::array();
  for (const auto& w : report.warnings) j["warnings"].push_back(w);
  j["error"] = report.error;
  write_text(dir / "report.json", dump_json(j));

  for (const auto& t : report.tables) {
    std::string s;
    for (std::size_t i = 0; i < t.columns.size(); ++i) s += (i ? "," : "") + t.columns[i];
    s += "\n";
    for (const auto& row : t.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) s += (i ? "," : "") + csv_cell(row[i]);
      s += "\n";
    }
    write_text(dir / (t.name + ".csv"), s);
  }
  for (const auto& f : report.fields) write_field(*f.field, dir / (f.name + ".fld"));

  Json timing = Json::object();
  timing["wall_seconds"] = report.wall_seconds;
  timing["threads"] = thread_cap();
  write_text(dir / "timing.json", dump_json(timing));
}

}  // namespace contactlab
