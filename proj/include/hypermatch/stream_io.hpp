#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hypermatch/types.hpp"

namespace hypermatch {

// Update stream text format, one token sequence per line:
//   + <edge_id> <v1> ... <vk>   insert a hyperedge
//   - <edge_id>                 delete an edge
//   ;                           end of batch
//   # ...                       comment (to end of line)
// A batch is homogeneous: all inserts or all deletes. A trailing batch
// without ';' is accepted; empty batches are not emitted.

class StreamParseError : public std::runtime_error {
 public:
  StreamParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

namespace detail {

inline std::uint64_t parse_u64(const std::string& token, std::size_t line) {
  try {
    std::size_t pos = 0;
    std::uint64_t value = std::stoull(token, &pos);
    if (pos != token.size()) throw std::invalid_argument(token);
    return value;
  } catch (const std::exception&) {
    throw StreamParseError(line, "expected unsigned integer, got '" + token + "'");
  }
}

}  // namespace detail

inline std::vector<UpdateBatch> parse_update_stream(std::istream& in) {
  std::vector<UpdateBatch> batches;
  UpdateBatch current;
  bool open = false;

  auto flush = [&]() {
    if (open) batches.push_back(std::move(current));
    current = UpdateBatch{};
    open = false;
  };

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::string op;
    if (!(ls >> op)) continue;
    if (op == ";") {
      std::string extra;
      if (ls >> extra) throw StreamParseError(lineno, "tokens after ';'");
      flush();
      continue;
    }
    if (op == "+") {
      std::string tok;
      if (!(ls >> tok)) throw StreamParseError(lineno, "missing edge id after '+'");
      EdgeId id = detail::parse_u64(tok, lineno);
      std::vector<VertexId> vertices;
      while (ls >> tok) vertices.push_back(detail::parse_u64(tok, lineno));
      if (vertices.empty())
        throw StreamParseError(lineno, "insert of edge " + std::to_string(id) +
                                           " lists no vertices");
      if (open && current.kind != BatchKind::Insert)
        throw StreamParseError(lineno, "insert inside a delete batch");
      current.kind = BatchKind::Insert;
      current.inserts.push_back(make_edge(id, std::move(vertices)));
      open = true;
      continue;
    }
    if (op == "-") {
      std::string tok;
      if (!(ls >> tok)) throw StreamParseError(lineno, "missing edge id after '-'");
      EdgeId id = detail::parse_u64(tok, lineno);
      std::string extra;
      if (ls >> extra) throw StreamParseError(lineno, "tokens after delete");
      if (open && current.kind != BatchKind::Delete)
        throw StreamParseError(lineno, "delete inside an insert batch");
      current.kind = BatchKind::Delete;
      current.deletes.push_back(id);
      open = true;
      continue;
    }
    throw StreamParseError(lineno, "unknown operation '" + op + "'");
  }
  flush();
  return batches;
}

inline void write_update_stream(std::ostream& out,
                                const std::vector<UpdateBatch>& batches) {
  for (const UpdateBatch& batch : batches) {
    if (batch.kind == BatchKind::Insert) {
      for (const Hyperedge& e : batch.inserts) {
        out << "+ " << e.id;
        for (VertexId v : e.vertices) out << ' ' << v;
        out << '\n';
      }
    } else {
      for (EdgeId id : batch.deletes) out << "- " << id << '\n';
    }
    out << ";\n";
  }
}

// Set cover stream format:
//   e <elem_id> <set_id> [<set_id> ...]   insert an element
//   - <elem_id>                           delete an element
// with ';' and '#' as in update streams.

struct SetCoverElement {
  std::uint64_t id = 0;
  std::vector<std::uint64_t> sets;
};

struct ElementBatch {
  BatchKind kind = BatchKind::Insert;
  std::vector<SetCoverElement> inserts;
  std::vector<std::uint64_t> deletes;
};

inline std::vector<ElementBatch> parse_set_cover_stream(std::istream& in) {
  std::vector<ElementBatch> batches;
  ElementBatch current;
  bool open = false;

  auto flush = [&]() {
    if (open) batches.push_back(std::move(current));
    current = ElementBatch{};
    open = false;
  };

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::string op;
    if (!(ls >> op)) continue;
    if (op == ";") {
      flush();
      continue;
    }
    if (op == "e") {
      std::string tok;
      if (!(ls >> tok)) throw StreamParseError(lineno, "missing element id");
      SetCoverElement elem;
      elem.id = detail::parse_u64(tok, lineno);
      while (ls >> tok) elem.sets.push_back(detail::parse_u64(tok, lineno));
      if (elem.sets.empty())
        throw StreamParseError(lineno, "element " + std::to_string(elem.id) +
                                           " belongs to no set");
      if (open && current.kind != BatchKind::Insert)
        throw StreamParseError(lineno, "element insert inside a delete batch");
      current.kind = BatchKind::Insert;
      current.inserts.push_back(std::move(elem));
      open = true;
      continue;
    }
    if (op == "-") {
      std::string tok;
      if (!(ls >> tok)) throw StreamParseError(lineno, "missing element id after '-'");
      std::uint64_t id = detail::parse_u64(tok, lineno);
      if (open && current.kind != BatchKind::Delete)
        throw StreamParseError(lineno, "element delete inside an insert batch");
      current.kind = BatchKind::Delete;
      current.deletes.push_back(id);
      open = true;
      continue;
    }
    throw StreamParseError(lineno, "unknown operation '" + op + "'");
  }
  flush();
  return batches;
}

}  // namespace hypermatch
