#include <map>

#include "clott/parse.hpp"

namespace clott {

const char* tok_name(Tok t) {
    switch (t) {
    case Tok::Ident: return "identifier";
    case Tok::Num: return "number";
    case Tok::KwClock: return "'clock'";
    case Tok::KwTick: return "'tick'";
    case Tok::KwDfix: return "'dfix'";
    case Tok::KwFix: return "'fix'";
    case Tok::KwForall: return "'forall'";
    case Tok::KwU: return "'U'";
    case Tok::KwEl: return "'El'";
    case Tok::KwIn: return "'in'";
    case Tok::KwDef: return "'def'";
    case Tok::KwType: return "'type'";
    case Tok::KwCirr: return "'cirr'";
    case Tok::KwTirr: return "'tirr'";
    case Tok::KwPfix: return "'pfix'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBrack: return "'['";
    case Tok::RBrack: return "']'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::Colon: return "':'";
    case Tok::Dot: return "'.'";
    case Tok::Comma: return "','";
    case Tok::Arrow: return "'->'";
    case Tok::Star: return "'*'";
    case Tok::Cons: return "'::'";
    case Tok::Lambda: return "'\\'";
    case Tok::BigLambda: return "'/\\'";
    case Tok::Later: return "'|>'";
    case Tok::Diamond: return "'<>'";
    case Tok::Caret: return "'^'";
    case Tok::Hash: return "'#'";
    case Tok::Assign: return "':='";
    case Tok::Eq: return "'='";
    case Tok::End: return "end of input";
    }
    return "?";
}

namespace {

// Decode one UTF-8 sequence at i; returns the code point and advances i.
// Malformed bytes decode to U+FFFD so that they surface as illegal characters.
char32_t decode(const std::string& s, std::size_t& i) {
    auto b = static_cast<unsigned char>(s[i]);
    int len = b < 0x80 ? 1 : (b >> 5) == 6 ? 2 : (b >> 4) == 14 ? 3 : (b >> 3) == 30 ? 4 : 0;
    if (len == 0 || i + static_cast<std::size_t>(len) > s.size()) {
        ++i;
        return 0xFFFD;
    }
    char32_t cp = len == 1 ? b : len == 2 ? (b & 0x1F) : len == 3 ? (b & 0x0F) : (b & 0x07);
    for (int k = 1; k < len; ++k) {
        auto c = static_cast<unsigned char>(s[i + static_cast<std::size_t>(k)]);
        if ((c >> 6) != 2) {
            ++i;
            return 0xFFFD;
        }
        cp = (cp << 6) | (c & 0x3F);
    }
    i += static_cast<std::size_t>(len);
    return cp;
}

void encode(char32_t cp, std::string& out) {
    if (cp < 0x80) {
        out += static_cast<char>(cp);
    } else if (cp < 0x800) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
        out += static_cast<char>(0xF0 | (cp >> 18));
        out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    }
}

bool ident_start(char32_t c) {
    if (c < 0x80) return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
    // Greek letters, except the two that are lambda tokens.
    return c >= 0x0370 && c <= 0x03FF && c != 0x03BB && c != 0x039B;
}

bool ident_rest(char32_t c) {
    if (ident_start(c)) return true;
    if (c >= '0' && c <= '9') return true;
    if (c == '\'') return true;
    return (c >= 0x2080 && c <= 0x2089) || c == 0x2032;   // subscript digits, prime
}

const std::map<std::string, Tok>& keywords() {
    static const std::map<std::string, Tok> kw = {
        {"clock", Tok::KwClock}, {"tick", Tok::KwTick}, {"dfix", Tok::KwDfix}, {"fix", Tok::KwFix},
        {"forall", Tok::KwForall}, {"U", Tok::KwU}, {"El", Tok::KwEl}, {"in", Tok::KwIn},
        {"def", Tok::KwDef}, {"type", Tok::KwType}, {"cirr", Tok::KwCirr}, {"tirr", Tok::KwTirr},
        {"pfix", Tok::KwPfix},
    };
    return kw;
}

}  // namespace

std::vector<Token> tokenize(const std::string& src) {
    std::vector<Token> out;
    std::size_t i = 0;
    int line = 1, col = 1;

    auto peek_cp = [&](std::size_t at) -> char32_t {
        if (at >= src.size()) return 0;
        std::size_t j = at;
        return decode(src, j);
    };

    while (i < src.size()) {
        std::size_t start = i;
        int sl = line, sc = col;
        char32_t c = decode(src, i);
        auto emit = [&](Tok k, std::string text) {
            out.push_back({k, std::move(text), {sl, sc, line, col}});
        };
        // Consume the next code point as part of the current token.
        auto take = [&]() {
            decode(src, i);
            ++col;
        };

        if (c == '\n') {
            ++line;
            col = 1;
            continue;
        }
        ++col;
        if (c == ' ' || c == '\t' || c == '\r') continue;
        if (c == '-' && peek_cp(i) == '-') {
            while (i < src.size() && src[i] != '\n') ++i;
            continue;
        }
        if (ident_start(c)) {
            std::string text;
            encode(c, text);
            while (i < src.size()) {
                std::size_t j = i;
                char32_t d = decode(src, j);
                if (!ident_rest(d)) break;
                encode(d, text);
                i = j;
                ++col;
            }
            auto it = keywords().find(text);
            emit(it == keywords().end() ? Tok::Ident : it->second, text);
            continue;
        }
        if (c >= '0' && c <= '9') {
            while (i < src.size() && src[i] >= '0' && src[i] <= '9') {
                ++i;
                ++col;
            }
            emit(Tok::Num, src.substr(start, i - start));
            continue;
        }
        char32_t n = peek_cp(i);
        switch (c) {
        case '(': emit(Tok::LParen, "("); continue;
        case ')': emit(Tok::RParen, ")"); continue;
        case '[': emit(Tok::LBrack, "["); continue;
        case ']': emit(Tok::RBrack, "]"); continue;
        case '{': emit(Tok::LBrace, "{"); continue;
        case '}': emit(Tok::RBrace, "}"); continue;
        case '.': emit(Tok::Dot, "."); continue;
        case ',': emit(Tok::Comma, ","); continue;
        case '*': emit(Tok::Star, "*"); continue;
        case '^': emit(Tok::Caret, "^"); continue;
        case '#': emit(Tok::Hash, "#"); continue;
        case '=': emit(Tok::Eq, "="); continue;
        case '\\': emit(Tok::Lambda, "\\"); continue;
        case ':':
            if (n == ':') { take(); emit(Tok::Cons, "::"); continue; }
            if (n == '=') { take(); emit(Tok::Assign, ":="); continue; }
            emit(Tok::Colon, ":");
            continue;
        case '-':
            if (n == '>') { take(); emit(Tok::Arrow, "->"); continue; }
            break;
        case '/':
            if (n == '\\') { take(); emit(Tok::BigLambda, "/\\"); continue; }
            break;
        case '|':
            if (n == '>') { take(); emit(Tok::Later, "|>"); continue; }
            break;
        case '<':
            if (n == '>') { take(); emit(Tok::Diamond, "<>"); continue; }
            break;
        case 0x03BB: emit(Tok::Lambda, "λ"); continue;
        case 0x039B: emit(Tok::BigLambda, "Λ"); continue;
        case 0x25B7: emit(Tok::Later, "▷"); continue;
        case 0x22C4: case 0x25C7: emit(Tok::Diamond, "⋄"); continue;
        case 0x2192: emit(Tok::Arrow, "→"); continue;
        case 0x00D7: emit(Tok::Star, "×"); continue;
        case 0x2200: emit(Tok::KwForall, "∀"); continue;
        case 0x2115: emit(Tok::Ident, "Nat"); continue;
        case 0x2254: emit(Tok::Assign, ":="); continue;
        default: break;
        }
        std::string bad;
        encode(c, bad);
        throw ParseError("illegal character '" + bad + "'", {sl, sc, sl, sc + 1});
    }
    out.push_back({Tok::End, "", {line, col, line, col}});
    return out;
}

}  // namespace clott
