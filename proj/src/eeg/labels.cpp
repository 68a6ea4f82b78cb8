#include "bciarm/eeg/labels.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "bciarm/error.hpp"
#include "bciarm/text.hpp"

namespace bciarm::eeg {

std::vector<LabelInterval> parse_labels(std::string_view body) {
  std::vector<LabelInterval> out;
  std::size_t line_no = 0;
  for (std::string_view raw : text::split(body, '\n')) {
    ++line_no;
    const std::string_view line = text::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto fields = text::split(line, ',');
    const std::string where = " at line " + std::to_string(line_no);
    if (fields.size() != 3) throw IoError("expected start_t,end_t,label" + where);
    const auto start = text::parse_double(fields[0]);
    const auto end = text::parse_double(fields[1]);
    const auto label = parse_command(text::trim(fields[2]));
    if (!start || !end || !std::isfinite(*start) || !std::isfinite(*end)) {
      throw IoError("bad interval bounds" + where);
    }
    if (!(*end > *start)) throw IoError("interval end must follow start" + where);
    if (!label) throw IoError("unknown label '" + std::string(text::trim(fields[2])) + "'" + where);
    out.push_back({*start, *end, *label});
  }
  return out;
}

std::vector<LabelInterval> load_labels(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("label track not found: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_labels(buf.str());
  } catch (const IoError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

std::string format_labels(std::span<const LabelInterval> labels) {
  std::string out = "# bci-arm labels v1\n";
  for (const LabelInterval& l : labels) {
    out += text::format_double(l.start_t) + "," + text::format_double(l.end_t) + "," +
           std::string(name(l.label)) + "\n";
  }
  return out;
}

void save_labels(const std::filesystem::path& path, std::span<const LabelInterval> labels) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write label track: " + path.string());
  out << format_labels(labels);
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace bciarm::eeg
