#include <fstream>
#include <iomanip>
#include <sstream>

#include "caploc/experiments.hpp"
#include "json.hpp"

namespace caploc {

namespace {

std::string ratio_cell(const RatioRecord& r) { return r.ratio ? r.ratio->to_string() : "inf"; }
std::string ratio_decimal(const RatioRecord& r) { return r.ratio ? r.ratio->to_decimal(6) : "inf"; }

// Quotes a CSV field only when it contains a separator, quote or newline.
std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

}  // namespace

ReportFormat parse_report_format(std::string_view text) {
  if (text == "text") return ReportFormat::Text;
  if (text == "csv") return ReportFormat::Csv;
  if (text == "structured" || text == "json") return ReportFormat::Structured;
  throw ParseError("unknown format '" + std::string(text) + "' (expected text, csv or structured)");
}

std::string emit_report(const std::vector<RatioRecord>& records, ReportFormat format, bool decimal) {
  std::ostringstream os;
  switch (format) {
    case ReportFormat::Csv: {
      os << "mechanism,instance,objective,mech_welfare,opt_welfare,ratio";
      if (decimal) os << ",ratio_decimal";
      os << '\n';
      for (const auto& r : records) {
        os << csv_field(r.mechanism) << ',' << csv_field(r.instance) << ',' << to_string(r.objective) << ','
           << r.mechanism_welfare.to_string() << ',' << r.optimal_welfare.to_string() << ',' << ratio_cell(r);
        if (decimal) os << ',' << ratio_decimal(r);
        os << '\n';
      }
      break;
    }
    case ReportFormat::Text: {
      std::vector<std::vector<std::string>> rows{{"mechanism", "instance", "objective", "mech_welfare", "opt_welfare", "ratio"}};
      if (decimal) rows.front().push_back("ratio_decimal");
      for (const auto& r : records) {
        rows.push_back({r.mechanism, r.instance, std::string(to_string(r.objective)), r.mechanism_welfare.to_string(),
                        r.optimal_welfare.to_string(), ratio_cell(r)});
        if (decimal) rows.back().push_back(ratio_decimal(r));
      }
      std::vector<std::size_t> width(rows.front().size(), 0);
      for (const auto& row : rows)
        for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
      for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
          if (c + 1 == row.size())
            os << row[c];
          else
            os << std::left << std::setw(static_cast<int>(width[c] + 2)) << row[c];
        }
        os << '\n';
      }
      break;
    }
    case ReportFormat::Structured: {
      nlohmann::ordered_json doc = nlohmann::ordered_json::array();
      for (const auto& r : records) {
        nlohmann::ordered_json row{{"mechanism", r.mechanism},
                                   {"instance", r.instance},
                                   {"objective", to_string(r.objective)},
                                   {"mech_welfare", r.mechanism_welfare.to_string()},
                                   {"opt_welfare", r.optimal_welfare.to_string()},
                                   {"ratio", ratio_cell(r)}};
        if (decimal) row["ratio_decimal"] = ratio_decimal(r);
        doc.push_back(std::move(row));
      }
      os << doc.dump(2) << '\n';
      break;
    }
  }
  return os.str();
}

std::string emit_audit(const AuditReport& report, ReportFormat format) {
  std::ostringstream os;
  switch (format) {
    case ReportFormat::Text:
      os << "scenario " << report.scenario << ": " << (report.pass ? "PASS" : "FAIL") << '\n';
      os << "  claim: " << report.claim << '\n';
      for (const auto& c : report.checks) {
        os << "  [" << (c.pass ? "ok" : "FAIL") << "] " << c.name;
        if (!c.detail.empty()) os << " -- " << c.detail;
        os << '\n';
      }
      break;
    case ReportFormat::Csv:
      os << "scenario,check,pass,detail\n";
      for (const auto& c : report.checks)
        os << csv_field(report.scenario) << ',' << csv_field(c.name) << ',' << (c.pass ? "true" : "false") << ','
           << csv_field(c.detail) << '\n';
      break;
    case ReportFormat::Structured: {
      nlohmann::ordered_json doc{{"scenario", report.scenario}, {"claim", report.claim}, {"pass", report.pass}};
      doc["checks"] = nlohmann::ordered_json::array();
      for (const auto& c : report.checks)
        doc["checks"].push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
      os << doc.dump(2) << '\n';
      break;
    }
  }
  return os.str();
}

void write_document(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << content;
  out.flush();
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace caploc
