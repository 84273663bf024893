#pragma once

#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "zipfkit/error.hpp"

namespace zipfkit {

struct SeqRecord {
  std::string id;
  std::string sequence;  // uppercase over {A,C,G,T,N}
  std::optional<std::string> category;
  std::string source_path;
  std::size_t record_index = 0;
};

struct FastaFile {
  std::vector<SeqRecord> records;
  std::size_t u_converted = 0;  // RNA 'U' bases rewritten to 'T'
};

inline FastaFile read_fasta(std::istream& in, const std::string& source,
                            const std::optional<std::string>& category = std::nullopt) {
  FastaFile file;
  std::string line;
  std::size_t line_no = 0;
  auto finish_record = [&] {
    if (!file.records.empty() && file.records.back().sequence.empty())
      throw Error(Errc::InvalidRecord, source + ": record '" + file.records.back().id + "' has no sequence");
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty() && line.front() == '>') {
      finish_record();
      SeqRecord rec;
      rec.id = line.substr(1);
      rec.category = category;
      rec.source_path = source;
      rec.record_index = file.records.size();
      file.records.push_back(std::move(rec));
      continue;
    }
    for (char c : line) {
      if (std::isspace(static_cast<unsigned char>(c))) continue;
      if (file.records.empty())
        throw Error(Errc::InvalidRecord, source + ":" + std::to_string(line_no) + ": sequence data before first '>' header");
      char base = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      if (base == 'U') {
        base = 'T';
        ++file.u_converted;
      }
      if (base != 'A' && base != 'C' && base != 'G' && base != 'T' && base != 'N')
        throw Error(Errc::InvalidBase, source + ":" + std::to_string(line_no) + ": invalid base '" + c + "'");
      file.records.back().sequence += base;
    }
  }
  if (file.records.empty()) throw Error(Errc::EmptyFile, source + ": no FASTA records");
  finish_record();
  return file;
}

inline FastaFile read_fasta(const std::filesystem::path& path,
                            const std::optional<std::string>& category = std::nullopt) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
  return read_fasta(in, path.string(), category);
}

inline bool is_valid_utf8(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size()) {
    const auto c = static_cast<unsigned char>(s[i]);
    std::size_t extra;
    std::uint32_t cp;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c & 0xE0) == 0xC0) {
      extra = 1;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      extra = 2;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      extra = 3;
      cp = c & 0x07;
    } else {
      return false;
    }
    if (i + extra >= s.size()) return false;
    for (std::size_t k = 1; k <= extra; ++k) {
      const auto cc = static_cast<unsigned char>(s[i + k]);
      if ((cc & 0xC0) != 0x80) return false;
      cp = (cp << 6) | (cc & 0x3F);
    }
    // Overlong forms, surrogates, out of range.
    if ((extra == 1 && cp < 0x80) || (extra == 2 && cp < 0x800) || (extra == 3 && cp < 0x10000) ||
        (cp >= 0xD800 && cp <= 0xDFFF) || cp > 0x10FFFF)
      return false;
    i += extra + 1;
  }
  return true;
}

// Decodes UTF-8/ASCII text and normalizes CRLF and lone CR to LF.
inline std::string normalize_text(std::string_view raw, const std::string& source = "<memory>") {
  if (!is_valid_utf8(raw)) throw Error(Errc::EncodingError, source + ": not valid UTF-8");
  std::string out;
  out.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (raw[i] == '\r') {
      out += '\n';
      if (i + 1 < raw.size() && raw[i + 1] == '\n') ++i;
    } else {
      out += raw[i];
    }
  }
  return out;
}

inline std::string read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw Error(Errc::IoError, "read failed: " + path.string());
  return std::move(buf).str();
}

inline std::string read_text(const std::filesystem::path& path) {
  return normalize_text(read_file_bytes(path), path.string());
}

}  // namespace zipfkit
