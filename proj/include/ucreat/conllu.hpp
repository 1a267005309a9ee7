#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "ucreat/detail/text.hpp"
#include "ucreat/error.hpp"

namespace ucreat {

/// Reserved token substituted for in-text citations during corpus preparation.
inline constexpr std::string_view citation_marker = "<CITATION>";

struct parsed_token {
    std::uint32_t index = 0;  // 1-based
    std::string form;
    std::string lemma;
    std::string upos;
    std::uint32_t head = 0;  // 0 = root
    std::string deprel;

    bool operator==(parsed_token const&) const = default;
};

struct parsed_sentence {
    std::vector<parsed_token> tokens;
    std::size_t sent_index = 0;

    std::size_t size() const noexcept { return tokens.size(); }
    parsed_token const& at(std::uint32_t index) const { return tokens.at(index - 1); }

    bool contains_form(std::string_view form) const
    {
        for (auto const& t : tokens) {
            if (t.form == form) {
                return true;
            }
        }
        return false;
    }

    bool operator==(parsed_sentence const&) const = default;
};

struct parsed_document {
    std::string doc_id;
    std::vector<parsed_sentence> sentences;

    bool operator==(parsed_document const&) const = default;
};

enum class side { left, right };

/// Dependents of token `index` on one side of it, in ascending position order.
inline std::vector<parsed_token const*>
children(parsed_sentence const& sentence, std::uint32_t index, side which)
{
    std::vector<parsed_token const*> out;
    for (auto const& t : sentence.tokens) {
        if (t.head != index) {
            continue;
        }
        if ((which == side::left && t.index < index) || (which == side::right && t.index > index)) {
            out.push_back(&t);
        }
    }
    return out;
}

namespace detail {

    inline bool parse_uint(std::string_view s, std::uint32_t& out)
    {
        if (s.empty()) {
            return false;
        }
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
        return ec == std::errc{} && ptr == s.data() + s.size();
    }

    // Checks single root, head range and acyclicity. `lines` holds the source
    // line of each token for error reporting.
    inline void validate_sentence(
        parsed_sentence const& sentence,
        std::vector<std::size_t> const& lines,
        std::string const& doc_id)
    {
        auto const n = static_cast<std::uint32_t>(sentence.tokens.size());
        std::size_t root_count = 0;
        for (std::size_t i = 0; i < sentence.tokens.size(); ++i) {
            auto const& t = sentence.tokens[i];
            if (t.head > n) {
                throw parse_error(doc_id, lines[i], "head " + std::to_string(t.head) + " out of range");
            }
            if (t.head == t.index) {
                throw parse_error(doc_id, lines[i], "token is its own head");
            }
            if (t.head == 0 && ++root_count > 1) {
                throw parse_error(doc_id, lines[i], "multiple roots in sentence");
            }
        }
        if (root_count == 0) {
            // Without a root every chain ends in a cycle; report the first token.
            throw parse_error(doc_id, lines.front(), "sentence has no root (cycle)");
        }
        // 0 = unvisited, 1 = on current path, 2 = reaches root
        std::vector<std::uint8_t> state(n + 1, 0);
        state[0] = 2;
        std::vector<std::uint32_t> path;
        for (std::uint32_t start = 1; start <= n; ++start) {
            path.clear();
            std::uint32_t cur = start;
            while (state[cur] == 0) {
                state[cur] = 1;
                path.push_back(cur);
                cur = sentence.tokens[cur - 1].head;
            }
            if (state[cur] == 1) {
                throw parse_error(doc_id, lines[cur - 1], "dependency cycle");
            }
            for (auto p : path) {
                state[p] = 2;
            }
        }
    }

}  // namespace detail

/// Reads a CoNLL-U stream. Only ID, FORM, LEMMA, UPOS, HEAD and DEPREL are
/// kept; multiword ranges and empty nodes are skipped.
inline parsed_document read_conllu(std::istream& in, std::string doc_id)
{
    parsed_document doc{std::move(doc_id), {}};
    parsed_sentence current;
    std::vector<std::size_t> lines;

    auto flush = [&] {
        if (current.tokens.empty()) {
            return;
        }
        detail::validate_sentence(current, lines, doc.doc_id);
        current.sent_index = doc.sentences.size();
        doc.sentences.push_back(std::move(current));
        current = {};
        lines.clear();
    };

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (detail::trim(line).empty()) {
            flush();
            continue;
        }
        if (line.front() == '#') {
            continue;
        }
        auto cols = detail::split(line, '\t');
        if (cols.size() != 10) {
            throw parse_error(doc.doc_id, line_no,
                "expected 10 columns, found " + std::to_string(cols.size()));
        }
        auto id = cols[0];
        if (id.find('-') != std::string_view::npos || id.find('.') != std::string_view::npos) {
            continue;
        }
        parsed_token tok;
        if (!detail::parse_uint(id, tok.index)) {
            throw parse_error(doc.doc_id, line_no, "non-numeric token id '" + std::string(id) + "'");
        }
        if (tok.index != current.tokens.size() + 1) {
            throw parse_error(doc.doc_id, line_no,
                "token id " + std::to_string(tok.index) + " out of sequence");
        }
        if (!detail::parse_uint(cols[6], tok.head)) {
            throw parse_error(doc.doc_id, line_no, "non-numeric head '" + std::string(cols[6]) + "'");
        }
        tok.form = cols[1];
        tok.lemma = cols[2];
        tok.upos = cols[3];
        tok.deprel = cols[7];
        current.tokens.push_back(std::move(tok));
        lines.push_back(line_no);
    }
    flush();
    return doc;
}

inline parsed_document read_conllu_file(std::string const& path, std::string doc_id)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ingestion_error(path);
    }
    return read_conllu(in, std::move(doc_id));
}

/// Writes the six consumed columns; the other four are emitted as `_`.
inline void write_conllu(std::ostream& out, parsed_document const& doc)
{
    for (auto const& s : doc.sentences) {
        for (auto const& t : s.tokens) {
            out << t.index << '\t' << t.form << '\t' << t.lemma << '\t' << t.upos << "\t_\t_\t"
                << t.head << '\t' << t.deprel << "\t_\t_\n";
        }
        out << '\n';
    }
}

}  // namespace ucreat
