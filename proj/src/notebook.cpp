// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The nbtrace Authors

#include "nbtrace/notebook.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace nbtrace {

namespace {

using nlohmann::json;

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

CellKind kind_of(const std::string& cell_type) {
  if (cell_type == "code") return CellKind::Code;
  if (cell_type == "markdown") return CellKind::Markdown;
  if (cell_type == "raw") return CellKind::Raw;
  return CellKind::Other;
}

std::string join_source(const json& source, int index) {
  if (source.is_string()) return source.get<std::string>();
  if (!source.is_array()) {
    throw MalformedNotebook("cell " + std::to_string(index) + ": source is neither a string nor a list");
  }
  std::string text;
  for (std::size_t i = 0; i < source.size(); ++i) {
    const json& line = source[i];
    if (!line.is_string()) {
      throw MalformedNotebook("cell " + std::to_string(index) + ": source line is not a string");
    }
    const auto& s = line.get_ref<const std::string&>();
    text += s;
    // Some writers drop the trailing newline of each line element.
    if (i + 1 < source.size() && (s.empty() || s.back() != '\n')) text += '\n';
  }
  return text;
}

std::string kernel_language_of(const json& root) {
  auto meta = root.find("metadata");
  if (meta == root.end() || !meta->is_object()) return {};
  auto spec = meta->find("kernelspec");
  if (spec != meta->end() && spec->is_object()) {
    auto lang = spec->find("language");
    if (lang != spec->end() && lang->is_string()) return lower(lang->get<std::string>());
  }
  auto info = meta->find("language_info");
  if (info != meta->end() && info->is_object()) {
    auto name = info->find("name");
    if (name != info->end() && name->is_string()) return lower(name->get<std::string>());
  }
  return {};
}

}  // namespace

NotebookDocument parse_notebook(std::string_view raw, std::string ref) {
  json root = json::parse(raw, nullptr, /*allow_exceptions=*/false);
  if (root.is_discarded()) throw MalformedNotebook("not valid JSON");
  if (!root.is_object()) throw MalformedNotebook("top level is not an object");
  auto version = root.find("nbformat");
  if (version == root.end() || !version->is_number_integer()) throw MalformedNotebook("missing nbformat version");
  if (version->get<int>() != 4) {
    throw MalformedNotebook("nbformat " + std::to_string(version->get<int>()) + " is not supported");
  }
  auto cells = root.find("cells");
  if (cells == root.end() || !cells->is_array()) throw MalformedNotebook("missing cells array");

  NotebookDocument nb;
  nb.notebook_ref = std::move(ref);
  nb.kernel_language = kernel_language_of(root);
  if (!nb.kernel_language.empty() && nb.kernel_language != kTargetKernelLanguage) {
    throw UnsupportedKernel(nb.kernel_language);
  }

  nb.cells.reserve(cells->size());
  int index = 0;
  for (const json& c : *cells) {
    if (!c.is_object()) throw MalformedNotebook("cell " + std::to_string(index) + " is not an object");
    auto type = c.find("cell_type");
    if (type == c.end() || !type->is_string()) {
      throw MalformedNotebook("cell " + std::to_string(index) + " has no cell_type");
    }
    Cell cell;
    cell.index = index;
    cell.kind = kind_of(type->get<std::string>());
    auto source = c.find("source");
    if (source != c.end()) cell.source = join_source(*source, index);
    nb.cells.push_back(std::move(cell));
    ++index;
  }
  return nb;
}

NotebookDocument load_notebook(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MalformedNotebook("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_notebook(buf.str(), path);
}

std::vector<Cell> extract_code_cells(const NotebookDocument& nb) {
  std::vector<Cell> out;
  std::copy_if(nb.cells.begin(), nb.cells.end(), std::back_inserter(out),
               [](const Cell& c) { return c.kind == CellKind::Code; });
  return out;
}

SanitizedSource sanitize_cell(const Cell& cell) {
  SanitizedSource out;
  std::string_view src = cell.source;
  int line_no = 0;
  std::size_t pos = 0;
  bool first_kept = true;
  while (pos <= src.size()) {
    std::size_t nl = src.find('\n', pos);
    std::string_view line = src.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    ++line_no;
    std::size_t lead = line.find_first_not_of(" \t");
    bool magic = lead != std::string_view::npos && (line[lead] == '%' || line[lead] == '!');
    if (magic) {
      out.dropped.push_back(DroppedLine{line_no, std::string(line)});
    } else {
      if (!first_kept) out.text += '\n';
      out.text += line;
      first_kept = false;
    }
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  return out;
}

}  // namespace nbtrace
