#include "noisydet/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "noisydet/error.hpp"

namespace noisydet::io {

namespace {

struct Row {
  std::size_t line = 0;
  std::vector<std::string> fields;
};

struct Header {
  std::size_t line = 0;
  std::vector<std::string> columns;

  bool empty() const { return columns.empty(); }
  std::size_t size() const { return columns.size(); }
};

std::vector<std::string> split(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.emplace_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string join(const std::vector<std::string>& fields) {
  std::string s;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) s += ',';
    s += fields[i];
  }
  return s;
}

// Reads the header and data rows.
Header read_rows(std::istream& in, std::vector<Row>& rows) {
  Header header;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (header.empty()) {
      header = {number, split(line)};
      continue;
    }
    rows.push_back({number, split(line)});
  }
  return header;
}

void expect_header(const Header& header, std::string_view expected) {
  if (header.empty()) return;  // empty file
  if (join(header.columns) != expected) {
    throw ParseError(header.line,
                     "unexpected header '" + join(header.columns) + "', expected '" + std::string(expected) + "'");
  }
}

double parse_double(const Row& row, std::size_t column, std::string_view name) {
  const std::string& text = row.fields.at(column);
  double value = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw ParseError(row.line, "field " + std::string(name) + ": '" + text + "' is not a number");
  }
  if (!std::isfinite(value)) throw ParseError(row.line, "field " + std::string(name) + " must be finite");
  return value;
}

void expect_fields(const Row& row, std::size_t count) {
  if (row.fields.size() != count) {
    throw ParseError(row.line, "expected " + std::to_string(count) + " fields, got " + std::to_string(row.fields.size()));
  }
}

Box parse_box(const Row& row, std::size_t first) {
  const double x1 = parse_double(row, first, "x1");
  const double y1 = parse_double(row, first + 1, "y1");
  const double x2 = parse_double(row, first + 2, "x2");
  const double y2 = parse_double(row, first + 3, "y2");
  try {
    return Box(x1, y1, x2, y2);
  } catch (const ValidationError& e) {
    throw ParseError(row.line, e.what());
  }
}

const std::string& checked_id(const std::string& id, std::string_view what) {
  if (id.find_first_of(",\n\r") != std::string::npos || (!id.empty() && id.front() == '#')) {
    throw ValidationError(std::string(what) + " '" + id + "' cannot be written as a CSV field");
  }
  return id;
}

void write_box(std::ostream& out, const Box& b) {
  out << format_number(b.x1()) << ',' << format_number(b.y1()) << ',' << format_number(b.x2()) << ','
      << format_number(b.y2());
}

template <typename Fn>
void rethrow_with_line(std::size_t line, Fn&& fn) {
  try {
    fn();
  } catch (const ParseError&) {
    throw;
  } catch (const ValidationError& e) {
    throw ParseError(line, e.what());
  }
}

}  // namespace

std::string format_number(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) throw ValidationError("cannot format number");
  return std::string(buf, ptr);
}

void write_provenance(std::ostream& out, const Provenance& provenance) {
  for (const auto& [key, value] : provenance) out << "# " << key << '=' << value << '\n';
}

std::vector<Annotation> read_dataset(std::istream& in) {
  std::vector<Row> rows;
  const auto header = read_rows(in, rows);
  const bool with_case = !header.empty() && header.size() == 9;
  if (!header.empty()) {
    if (with_case) {
      expect_header(header, kDatasetHeader);
    } else {
      expect_header(header, kDatasetHeader.substr(0, kDatasetHeader.rfind(',')));
    }
  }
  std::vector<Annotation> out;
  out.reserve(rows.size());
  for (const auto& row : rows) {
    expect_fields(row, header.size());
    Annotation a{row.fields[0], row.fields[1], parse_box(row, 2), parse_double(row, 6, "image_width"),
                 parse_double(row, 7, "image_height"), with_case ? row.fields[8] : std::string{}};
    rethrow_with_line(row.line, [&] { a.validate(); });
    out.push_back(std::move(a));
  }
  validate_dataset(out);
  return out;
}

void write_dataset(std::ostream& out, std::span<const Annotation> annotations, const Provenance& provenance) {
  write_provenance(out, provenance);
  out << kDatasetHeader << '\n';
  for (const auto& a : annotations) {
    out << checked_id(a.image_id, "image_id") << ',' << checked_id(a.lesion_id, "lesion_id") << ',';
    write_box(out, a.box);
    out << ',' << format_number(a.image_width) << ',' << format_number(a.image_height) << ','
        << checked_id(a.case_id, "case_id") << '\n';
  }
}

std::vector<Detection> read_detections(std::istream& in) {
  std::vector<Row> rows;
  const auto header = read_rows(in, rows);
  expect_header(header, kDetectionHeader);
  std::vector<Detection> out;
  out.reserve(rows.size());
  for (const auto& row : rows) {
    expect_fields(row, 6);
    out.push_back({row.fields[0], parse_box(row, 1), parse_double(row, 5, "score")});
  }
  return out;
}

void write_detections(std::ostream& out, std::span<const Detection> detections, const Provenance& provenance) {
  write_provenance(out, provenance);
  out << kDetectionHeader << '\n';
  for (const auto& d : detections) {
    out << checked_id(d.image_id, "image_id") << ',';
    write_box(out, d.box);
    out << ',' << format_number(d.score) << '\n';
  }
}

std::vector<Proposal> read_proposals(std::istream& in) {
  std::vector<Row> rows;
  const auto header = read_rows(in, rows);
  expect_header(header, kProposalHeader);
  std::vector<Proposal> out;
  out.reserve(rows.size());
  for (const auto& row : rows) {
    expect_fields(row, 7);
    const double label = parse_double(row, 5, "true_label");
    if (label != 0.0 && label != 1.0) throw ParseError(row.line, "true_label must be 0 or 1");
    const double prob = parse_double(row, 6, "predicted_prob");
    const Box box = parse_box(row, 1);
    std::optional<ScoredProposal> p;
    rethrow_with_line(row.line, [&] { p = ScoredProposal::make(box, static_cast<int>(label), prob); });
    out.push_back({row.fields[0], *p});
  }
  return out;
}

void write_proposals(std::ostream& out, std::span<const Proposal> proposals, const Provenance& provenance) {
  write_provenance(out, provenance);
  out << kProposalHeader << '\n';
  for (const auto& p : proposals) {
    out << checked_id(p.image_id, "image_id") << ',';
    write_box(out, p.proposal.box);
    out << ',' << p.proposal.true_label << ',' << format_number(p.proposal.predicted_prob) << '\n';
  }
}

std::vector<CensusRow> read_census(std::istream& in) {
  std::vector<Row> rows;
  const auto header = read_rows(in, rows);
  expect_header(header, kCensusHeader);
  std::vector<CensusRow> out;
  for (const auto& row : rows) {
    expect_fields(row, 3);
    CensusRow r;
    r.criterion = row.fields[0];
    r.level = row.fields[1];
    r.positives_per_lesion = parse_double(row, 2, "positives_per_lesion");
    out.push_back(std::move(r));
  }
  return out;
}

void write_census(std::ostream& out, std::span<const CensusRow> rows, const Provenance& provenance) {
  write_provenance(out, provenance);
  out << kCensusHeader << '\n';
  for (const auto& r : rows) {
    out << checked_id(r.criterion, "criterion") << ',' << checked_id(r.level, "level") << ','
        << format_number(r.positives_per_lesion) << '\n';
  }
}

void write_curve(std::ostream& out, const FrocCurve& curve, const Provenance& provenance) {
  write_provenance(out, provenance);
  out << kCurveHeader << '\n';
  for (const auto& p : curve.points) out << format_number(p.fp_per_image) << ',' << format_number(p.sensitivity) << '\n';
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot write " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw ValidationError("failed writing " + path.string());
}

}  // namespace noisydet::io
