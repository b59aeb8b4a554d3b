#include "bfpack/plan_io.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>
#include <unordered_map>

#include <json.hpp>

#include "bfpack/error.hpp"

namespace bfpack {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string at_line(std::size_t line_no, std::string_view what) {
  return "plan line " + std::to_string(line_no) + ": " + std::string(what);
}

}  // namespace

void write_plan(std::ostream& out, const PackingPlan& plan,
                const Corpus& corpus) {
  for (std::size_t s = 0; s < plan.num_sequences(); ++s) {
    ordered_json line;
    line["seq"] = s;
    auto items = ordered_json::array();
    for (const auto& chunk : plan.sequence(s)) {
      if (chunk.doc >= corpus.size()) {
        throw Error(ErrorKind::other, "plan references a document outside the corpus");
      }
      ordered_json item;
      item["doc"] = corpus[chunk.doc].id;
      item["start"] = chunk.start;
      item["end"] = chunk.end;
      items.push_back(std::move(item));
    }
    line["items"] = std::move(items);
    line["pad"] = plan.pads[s];
    out << line.dump() << '\n';
  }
  if (!out) throw Error(ErrorKind::io, "failed writing plan");
}

PackingPlan read_plan(std::istream& in, const Corpus& corpus, Method method) {
  std::unordered_map<std::string_view, std::uint32_t> doc_index;
  doc_index.reserve(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    doc_index.emplace(corpus[i].id, static_cast<std::uint32_t>(i));
  }

  PackingPlan plan;
  plan.max_seq_len = corpus.max_seq_len();
  plan.method = method;
  plan.source_tokens = corpus.total_tokens();

  const std::uint64_t L = corpus.max_seq_len();
  std::string text;
  std::size_t line_no = 0;
  while (std::getline(in, text)) {
    ++line_no;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto line = ordered_json::parse(text, nullptr, false);
    if (line.is_discarded() || !line.is_object()) {
      throw Error(ErrorKind::parse, at_line(line_no, "malformed record"));
    }
    const auto seq = line.find("seq");
    const auto items = line.find("items");
    const auto pad = line.find("pad");
    if (seq == line.end() || !seq->is_number_unsigned() ||
        seq->get<std::uint64_t>() != plan.num_sequences()) {
      throw Error(ErrorKind::parse,
                  at_line(line_no, "expected \"seq\": " +
                                       std::to_string(plan.num_sequences())));
    }
    if (items == line.end() || !items->is_array() || pad == line.end() ||
        !pad->is_number_unsigned()) {
      throw Error(ErrorKind::parse, at_line(line_no, "missing items or pad"));
    }

    std::uint64_t used = 0;
    for (const auto& item : *items) {
      const auto doc = item.find("doc");
      const auto start = item.find("start");
      const auto end = item.find("end");
      if (!item.is_object() || doc == item.end() || !doc->is_string() ||
          start == item.end() || !start->is_number_unsigned() ||
          end == item.end() || !end->is_number_unsigned()) {
        throw Error(ErrorKind::parse, at_line(line_no, "malformed item"));
      }
      const auto it = doc_index.find(doc->get_ref<const std::string&>());
      if (it == doc_index.end()) {
        throw Error(ErrorKind::parse,
                    at_line(line_no, "unknown document '" +
                                         doc->get<std::string>() + "'"));
      }
      const auto s = start->get<std::uint64_t>();
      const auto e = end->get<std::uint64_t>();
      if (s >= e || e > corpus[it->second].length) {
        throw Error(ErrorKind::parse, at_line(line_no, "slice out of range"));
      }
      used += e - s;
      plan.items.push_back(Chunk{it->second, 0, static_cast<std::uint32_t>(s),
                                 static_cast<std::uint32_t>(e)});
    }
    const auto pad_value = pad->get<std::uint64_t>();
    if (used + pad_value != L) {
      throw Error(ErrorKind::capacity,
                  at_line(line_no, "items plus pad do not sum to " +
                                       std::to_string(L)));
    }
    plan.pads.push_back(static_cast<std::uint32_t>(pad_value));
    plan.offsets.push_back(plan.items.size());
  }
  if (in.bad()) throw Error(ErrorKind::io, "failed reading plan");

  // Slice ordinal = rank of the slice's start among its document's slices.
  std::vector<std::size_t> order(plan.items.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& x = plan.items[a];
    const auto& y = plan.items[b];
    return std::tie(x.doc, x.start) < std::tie(y.doc, y.start);
  });
  for (std::size_t i = 0; i < order.size(); ++i) {
    auto& chunk = plan.items[order[i]];
    const bool first = i == 0 || plan.items[order[i - 1]].doc != chunk.doc;
    chunk.index = first ? 0 : plan.items[order[i - 1]].index + 1;
  }
  return plan;
}

PackingPlan load_plan(const std::filesystem::path& path, const Corpus& corpus,
                      Method method) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open plan file " + path.string());
  return read_plan(in, corpus, method);
}

void materialize(std::ostream& out, const PackingPlan& plan,
                 const Corpus& corpus, TokenId pad_id) {
  if (corpus.mode() != IngestMode::token_ids) {
    throw Error(ErrorKind::config, "materialize needs a token-ids corpus");
  }
  if (plan.max_seq_len != corpus.max_seq_len()) {
    throw Error(ErrorKind::config, "plan and corpus disagree on L");
  }
  std::vector<char> row(static_cast<std::size_t>(plan.max_seq_len) * 4);
  auto put = [&](std::size_t slot, TokenId id) {
    for (std::size_t b = 0; b < 4; ++b) {
      row[4 * slot + b] = static_cast<char>((id >> (8 * b)) & 0xFFu);
    }
  };
  for (std::size_t s = 0; s < plan.num_sequences(); ++s) {
    std::size_t slot = 0;
    for (const auto& chunk : plan.sequence(s)) {
      const auto& tokens = corpus[chunk.doc].tokens;
      if (slot + chunk.length() > plan.max_seq_len || chunk.end > tokens.size()) {
        throw Error(ErrorKind::capacity, "sequence " + std::to_string(s) +
                                             " does not fit in L tokens");
      }
      for (auto t = chunk.start; t < chunk.end; ++t) put(slot++, tokens[t]);
    }
    while (slot < plan.max_seq_len) put(slot++, pad_id);
    out.write(row.data(), static_cast<std::streamsize>(row.size()));
  }
  if (!out) throw Error(ErrorKind::io, "failed writing sequences");
}

}  // namespace bfpack
