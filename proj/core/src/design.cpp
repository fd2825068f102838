#include "vcadslicer/design.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>

#include "vcadslicer/errors.hpp"

namespace vcad {

namespace {

struct Token {
    enum Kind { ident, number, string, punct, eof } kind = eof;
    std::string text;
    double value = 0;
    int line = 1, col = 1;
};

class Lexer {
public:
    explicit Lexer(const std::string& text) : m_text(text) { advance(); }

    const Token& peek() const { return m_tok; }

    Token take() {
        Token t = m_tok;
        advance();
        return t;
    }

private:
    void advance() {
        skip_ws_and_comments();
        m_tok = Token{};
        m_tok.line = m_line;
        m_tok.col = int(m_pos - m_line_start) + 1;
        if (m_pos >= m_text.size()) {
            m_tok.kind = Token::eof;
            return;
        }
        char ch = m_text[m_pos];
        if (std::isalpha((unsigned char)ch) || ch == '_') {
            size_t start = m_pos;
            while (m_pos < m_text.size() &&
                   (std::isalnum((unsigned char)m_text[m_pos]) || m_text[m_pos] == '_'))
                ++m_pos;
            m_tok.kind = Token::ident;
            m_tok.text = m_text.substr(start, m_pos - start);
            return;
        }
        if (std::isdigit((unsigned char)ch) || ch == '.' ||
            (ch == '-' && m_pos + 1 < m_text.size() &&
             (std::isdigit((unsigned char)m_text[m_pos + 1]) || m_text[m_pos + 1] == '.'))) {
            size_t start = m_pos;
            if (ch == '-')
                ++m_pos;
            while (m_pos < m_text.size() &&
                   (std::isdigit((unsigned char)m_text[m_pos]) || m_text[m_pos] == '.' ||
                    m_text[m_pos] == 'e' || m_text[m_pos] == 'E' ||
                    ((m_text[m_pos] == '+' || m_text[m_pos] == '-') &&
                     (m_text[m_pos - 1] == 'e' || m_text[m_pos - 1] == 'E'))))
                ++m_pos;
            m_tok.kind = Token::number;
            m_tok.text = m_text.substr(start, m_pos - start);
            auto [p, ec] =
                std::from_chars(m_text.data() + start, m_text.data() + m_pos, m_tok.value);
            if (ec != std::errc() || p != m_text.data() + m_pos)
                fail("malformed number '" + m_tok.text + "'");
            return;
        }
        if (ch == '"') {
            ++m_pos;
            size_t start = m_pos;
            while (m_pos < m_text.size() && m_text[m_pos] != '"') {
                if (m_text[m_pos] == '\n')
                    fail("unterminated string");
                ++m_pos;
            }
            if (m_pos >= m_text.size())
                fail("unterminated string");
            m_tok.kind = Token::string;
            m_tok.text = m_text.substr(start, m_pos - start);
            ++m_pos;
            return;
        }
        m_tok.kind = Token::punct;
        m_tok.text = std::string(1, ch);
        ++m_pos;
    }

    void skip_ws_and_comments() {
        for (;;) {
            while (m_pos < m_text.size() && std::isspace((unsigned char)m_text[m_pos])) {
                if (m_text[m_pos] == '\n') {
                    ++m_line;
                    m_line_start = m_pos + 1;
                }
                ++m_pos;
            }
            if (m_pos + 1 < m_text.size() && m_text[m_pos] == '/' && m_text[m_pos + 1] == '/') {
                while (m_pos < m_text.size() && m_text[m_pos] != '\n')
                    ++m_pos;
                continue;
            }
            break;
        }
    }

    [[noreturn]] void fail(const std::string& what) {
        throw Error(errc::syntax, "design error at " + std::to_string(m_line) + ":" +
                                      std::to_string(m_pos - m_line_start + 1) + ": " + what);
    }

    const std::string& m_text;
    size_t m_pos = 0;
    int m_line = 1;
    size_t m_line_start = 0;
    Token m_tok;
};

class DesignParser {
public:
    explicit DesignParser(const std::string& text) : m_lex(text) {}

    Design parse() {
        Design d;
        d.root = parse_node();
        if (m_lex.peek().kind != Token::eof)
            fail(m_lex.peek(), "unexpected trailing input");
        return d;
    }

private:
    [[noreturn]] void fail(const Token& tok, const std::string& what) {
        throw Error(errc::syntax, "design error at " + std::to_string(tok.line) + ":" +
                                      std::to_string(tok.col) + ": " + what);
    }

    [[noreturn]] void fail_arity(const Token& tok, const std::string& what) {
        throw Error(errc::arity, "design error at " + std::to_string(tok.line) + ":" +
                                     std::to_string(tok.col) + ": " + what);
    }

    void expect_punct(const char* p) {
        Token t = m_lex.take();
        if (t.kind != Token::punct || t.text != p)
            fail(t, std::string("expected '") + p + "', got '" + t.text + "'");
    }

    double expect_number() {
        Token t = m_lex.take();
        if (t.kind != Token::number)
            fail(t, "expected a number, got '" + t.text + "'");
        return t.value;
    }

    std::string expect_string() {
        Token t = m_lex.take();
        if (t.kind != Token::string)
            fail(t, "expected a quoted string, got '" + t.text + "'");
        return t.text;
    }

    std::vector<std::string> parse_string_list() {
        expect_punct("[");
        std::vector<std::string> items;
        items.push_back(expect_string());
        while (m_lex.peek().kind == Token::punct && m_lex.peek().text == ",") {
            m_lex.take();
            items.push_back(expect_string());
        }
        expect_punct("]");
        return items;
    }

    NodePtr parse_node() {
        Token t = m_lex.take();
        if (t.kind != Token::ident)
            fail(t, "expected a node name, got '" + t.text + "'");
        auto node = std::make_shared<DesignNode>();
        const std::string& name = t.text;

        if (name == "cylinder") {
            node->kind = NodeKind::cylinder;
            expect_punct("(");
            node->a = expect_number(); // radius
            expect_punct(",");
            node->b = expect_number(); // height
            expect_punct(")");
            expect_punct(";");
        } else if (name == "rectprism") {
            node->kind = NodeKind::rectprism;
            expect_punct("(");
            node->a = expect_number();
            expect_punct(",");
            node->b = expect_number();
            expect_punct(",");
            node->c = expect_number();
            expect_punct(")");
            expect_punct(";");
        } else if (name == "sphere") {
            node->kind = NodeKind::sphere;
            expect_punct("(");
            node->a = expect_number();
            expect_punct(")");
            expect_punct(";");
        } else if (name == "mesh") {
            node->kind = NodeKind::mesh;
            expect_punct("(");
            node->mesh_path = expect_string();
            expect_punct(")");
            expect_punct(";");
        } else if (name == "union" || name == "difference" || name == "intersection") {
            node->kind = name == "union" ? NodeKind::csg_union
                         : name == "difference" ? NodeKind::csg_difference
                                                : NodeKind::csg_intersection;
            expect_punct("(");
            expect_punct(")");
            expect_punct("{");
            while (!(m_lex.peek().kind == Token::punct && m_lex.peek().text == "}"))
                node->children.push_back(parse_node());
            expect_punct("}");
            if (node->children.empty())
                fail(t, name + "() requires at least one child");
        } else if (name == "translate") {
            node->kind = NodeKind::translate;
            expect_punct("(");
            expect_punct("[");
            node->offset.x = expect_number();
            expect_punct(",");
            node->offset.y = expect_number();
            expect_punct(",");
            node->offset.z = expect_number();
            expect_punct("]");
            expect_punct(")");
            expect_punct("{");
            node->children.push_back(parse_node());
            expect_punct("}");
        } else if (name == "fgrade") {
            node->kind = NodeKind::fgrade;
            expect_punct("(");
            std::vector<std::string> exprs = parse_string_list();
            expect_punct(",");
            node->materials = parse_string_list();
            expect_punct(")");
            if (exprs.size() != node->materials.size())
                fail_arity(t, "fgrade has " + std::to_string(exprs.size()) +
                                  " fraction expression(s) but " +
                                  std::to_string(node->materials.size()) + " material name(s)");
            for (const std::string& src : exprs)
                node->fractions.push_back({src, parse_expression(src)});
            expect_punct("{");
            node->children.push_back(parse_node());
            expect_punct("}");
        } else {
            fail(t, "unknown node '" + name + "'");
        }
        return node;
    }

    Lexer m_lex;
};

double sdf_node(const DesignNode& node, const Vec3& p);

double sdf_cylinder(double r, double h, const Vec3& p) {
    double dxy = std::sqrt(p.x * p.x + p.y * p.y) - r;
    double dz = std::abs(p.z - h * 0.5) - h * 0.5;
    double outside = std::sqrt(std::pow(std::max(dxy, 0.0), 2) + std::pow(std::max(dz, 0.0), 2));
    return outside + std::min(std::max(dxy, dz), 0.0);
}

double sdf_box(double w, double d, double h, const Vec3& p) {
    double qx = std::abs(p.x) - w * 0.5;
    double qy = std::abs(p.y) - d * 0.5;
    double qz = std::abs(p.z - h * 0.5) - h * 0.5;
    double ox = std::max(qx, 0.0), oy = std::max(qy, 0.0), oz = std::max(qz, 0.0);
    double outside = std::sqrt(ox * ox + oy * oy + oz * oz);
    return outside + std::min(std::max({qx, qy, qz}), 0.0);
}

double sdf_node(const DesignNode& node, const Vec3& p) {
    switch (node.kind) {
    case NodeKind::cylinder: return sdf_cylinder(node.a, node.b, p);
    case NodeKind::rectprism: return sdf_box(node.a, node.b, node.c, p);
    case NodeKind::sphere: {
        Vec3 q{p.x, p.y, p.z - node.a};
        return q.norm() - node.a;
    }
    case NodeKind::mesh:
        throw Error(errc::mesh_not_loaded,
                    "mesh node '" + node.mesh_path +
                        "' has no signed distance; slice the mesh directly");
    case NodeKind::csg_union: {
        double d = sdf_node(*node.children[0], p);
        for (size_t i = 1; i < node.children.size(); ++i)
            d = std::min(d, sdf_node(*node.children[i], p));
        return d;
    }
    case NodeKind::csg_intersection: {
        double d = sdf_node(*node.children[0], p);
        for (size_t i = 1; i < node.children.size(); ++i)
            d = std::max(d, sdf_node(*node.children[i], p));
        return d;
    }
    case NodeKind::csg_difference: {
        double d = sdf_node(*node.children[0], p);
        for (size_t i = 1; i < node.children.size(); ++i)
            d = std::max(d, -sdf_node(*node.children[i], p));
        return d;
    }
    case NodeKind::translate:
        return sdf_node(*node.children[0], p - node.offset);
    case NodeKind::fgrade:
        return sdf_node(*node.children[0], p);
    }
    return 0.0;
}

// Innermost fgrade wins. Fraction expressions evaluate in the frame where
// their fgrade node sits, so translations above an fgrade move the field
// with the subtree.
struct FGradeHit {
    const DesignNode* node;
    Vec3 local;
};

std::optional<FGradeHit> find_fgrade(const DesignNode& node, const Vec3& local) {
    switch (node.kind) {
    case NodeKind::fgrade: {
        if (auto deeper = find_fgrade(*node.children[0], local))
            return deeper;
        return FGradeHit{&node, local};
    }
    case NodeKind::translate:
        return find_fgrade(*node.children[0], local - node.offset);
    case NodeKind::csg_union: {
        // The nearest child's field applies; children lacking an fgrade
        // defer to the next nearest.
        std::vector<std::pair<double, const DesignNode*>> order;
        for (const NodePtr& child : node.children) {
            double d;
            try {
                d = sdf_node(*child, local);
            } catch (const Error&) {
                d = 0.0; // mesh child: no SDF available
            }
            order.push_back({d, child.get()});
        }
        std::stable_sort(order.begin(), order.end(),
                         [](const auto& a, const auto& b) { return a.first < b.first; });
        for (const auto& [d, child] : order)
            if (auto hit = find_fgrade(*child, local))
                return hit;
        return std::nullopt;
    }
    case NodeKind::csg_difference:
    case NodeKind::csg_intersection:
        // Solid material comes from the first (base) child.
        return find_fgrade(*node.children[0], local);
    default:
        return std::nullopt;
    }
}

} // namespace

Design parse_design(const std::string& text) {
    return DesignParser(text).parse();
}

static void load_meshes_rec(DesignNode& node, const std::string& base_dir) {
    if (node.kind == NodeKind::mesh && !node.mesh) {
        std::string path = node.mesh_path;
        if (!path.empty() && path[0] != '/' && !base_dir.empty())
            path = base_dir + "/" + path;
        node.mesh = std::make_shared<MeshData>(read_stl(path));
    }
    for (const NodePtr& child : node.children)
        load_meshes_rec(*child, base_dir);
}

void load_meshes(Design& design, const std::string& base_dir) {
    load_meshes_rec(*design.root, base_dir);
}

double eval_sdf(const Design& design, const Vec3& p) {
    return sdf_node(*design.root, p);
}

FractionVector eval_fractions(const Design& design, const Vec3& p, WarningLog* warnings) {
    std::optional<FGradeHit> hit = find_fgrade(*design.root, p);
    if (!hit)
        return {{"default"}, {1.0}};
    const DesignNode* fg = hit->node;

    FractionVector out;
    out.names = fg->materials;
    out.values.reserve(fg->fractions.size());
    double sum = 0.0;
    for (const FGradeField& field : fg->fractions) {
        double v = eval_expression(field.expr, hit->local);
        if (!std::isfinite(v))
            throw Error(errc::eval, "fraction expression '" + field.source +
                                        "' evaluated to a non-finite value");
        v = std::clamp(v, 0.0, 1.0);
        out.values.push_back(v);
        sum += v;
    }
    if (sum <= 0.0)
        throw Error(errc::eval, "material fractions sum to zero after clamping");
    if (std::abs(sum - 1.0) > 1e-3)
        warn(warnings, "material fractions sum to " + std::to_string(sum) +
                           " before normalization (expected 1)");
    for (double& v : out.values)
        v /= sum;
    return out;
}

double eval_gradient(const Design& design, const Vec3& p, WarningLog* warnings) {
    FractionVector f = eval_fractions(design, p, warnings);
    return std::clamp(1.0 - f.values[0], 0.0, 1.0);
}

static void collect_materials(const DesignNode& node, std::vector<std::string>& out) {
    if (node.kind == NodeKind::fgrade)
        for (const std::string& m : node.materials)
            if (std::find(out.begin(), out.end(), m) == out.end())
                out.push_back(m);
    for (const NodePtr& child : node.children)
        collect_materials(*child, out);
}

std::vector<std::string> design_materials(const Design& design) {
    std::vector<std::string> out;
    collect_materials(*design.root, out);
    if (out.empty())
        out.push_back("default");
    return out;
}

static BBox3 bbox_node(const DesignNode& node) {
    BBox3 box;
    switch (node.kind) {
    case NodeKind::cylinder:
        box.expand({-node.a, -node.a, 0});
        box.expand({node.a, node.a, node.b});
        break;
    case NodeKind::rectprism:
        box.expand({-node.a / 2, -node.b / 2, 0});
        box.expand({node.a / 2, node.b / 2, node.c});
        break;
    case NodeKind::sphere:
        box.expand({-node.a, -node.a, 0});
        box.expand({node.a, node.a, 2 * node.a});
        break;
    case NodeKind::mesh:
        if (!node.mesh)
            throw Error(errc::mesh_not_loaded,
                        "mesh '" + node.mesh_path + "' not loaded; call load_meshes()");
        box = node.mesh->bbox;
        break;
    case NodeKind::csg_union:
        for (const NodePtr& child : node.children)
            box.expand(bbox_node(*child));
        break;
    case NodeKind::csg_difference:
    case NodeKind::csg_intersection:
        box = bbox_node(*node.children[0]);
        break;
    case NodeKind::translate: {
        BBox3 inner = bbox_node(*node.children[0]);
        box.expand(inner.min + node.offset);
        box.expand(inner.max + node.offset);
        break;
    }
    case NodeKind::fgrade:
        box = bbox_node(*node.children[0]);
        break;
    }
    return box;
}

BBox3 design_bbox(const Design& design) {
    return bbox_node(*design.root);
}

namespace {

void format_number(std::string& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out += buf;
}

void print_node(const DesignNode& node, std::string& out, int indent) {
    std::string pad(size_t(indent) * 2, ' ');
    out += pad;
    switch (node.kind) {
    case NodeKind::cylinder:
        out += "cylinder(";
        format_number(out, node.a);
        out += ", ";
        format_number(out, node.b);
        out += ");\n";
        break;
    case NodeKind::rectprism:
        out += "rectprism(";
        format_number(out, node.a);
        out += ", ";
        format_number(out, node.b);
        out += ", ";
        format_number(out, node.c);
        out += ");\n";
        break;
    case NodeKind::sphere:
        out += "sphere(";
        format_number(out, node.a);
        out += ");\n";
        break;
    case NodeKind::mesh:
        out += "mesh(\"" + node.mesh_path + "\");\n";
        break;
    case NodeKind::csg_union:
    case NodeKind::csg_difference:
    case NodeKind::csg_intersection:
        out += node.kind == NodeKind::csg_union ? "union()"
               : node.kind == NodeKind::csg_difference ? "difference()"
                                                       : "intersection()";
        out += " {\n";
        for (const NodePtr& child : node.children)
            print_node(*child, out, indent + 1);
        out += pad + "}\n";
        break;
    case NodeKind::translate:
        out += "translate([";
        format_number(out, node.offset.x);
        out += ", ";
        format_number(out, node.offset.y);
        out += ", ";
        format_number(out, node.offset.z);
        out += "]) {\n";
        print_node(*node.children[0], out, indent + 1);
        out += pad + "}\n";
        break;
    case NodeKind::fgrade: {
        out += "fgrade([";
        for (size_t i = 0; i < node.fractions.size(); ++i) {
            if (i)
                out += ", ";
            out += "\"" + node.fractions[i].source + "\"";
        }
        out += "], [";
        for (size_t i = 0; i < node.materials.size(); ++i) {
            if (i)
                out += ", ";
            out += "\"" + node.materials[i] + "\"";
        }
        out += "]) {\n";
        print_node(*node.children[0], out, indent + 1);
        out += pad + "}\n";
        break;
    }
    }
}

bool nodes_equal(const DesignNode& a, const DesignNode& b) {
    if (a.kind != b.kind || a.a != b.a || a.b != b.b || a.c != b.c ||
        a.mesh_path != b.mesh_path || a.materials != b.materials ||
        a.children.size() != b.children.size() || a.fractions.size() != b.fractions.size())
        return false;
    if (a.offset.x != b.offset.x || a.offset.y != b.offset.y || a.offset.z != b.offset.z)
        return false;
    for (size_t i = 0; i < a.fractions.size(); ++i)
        if (!expressions_equal(*a.fractions[i].expr, *b.fractions[i].expr))
            return false;
    for (size_t i = 0; i < a.children.size(); ++i)
        if (!nodes_equal(*a.children[i], *b.children[i]))
            return false;
    return true;
}

} // namespace

std::string design_to_string(const Design& design) {
    std::string out;
    print_node(*design.root, out, 0);
    return out;
}

bool designs_equal(const Design& a, const Design& b) {
    return nodes_equal(*a.root, *b.root);
}

std::optional<MeshGeometry> design_mesh_geometry(const Design& design) {
    const DesignNode* node = design.root.get();
    Vec3 offset{0, 0, 0};
    while (node) {
        switch (node->kind) {
        case NodeKind::mesh:
            if (!node->mesh)
                throw Error(errc::mesh_not_loaded,
                            "mesh '" + node->mesh_path + "' not loaded; call load_meshes()");
            return MeshGeometry{node->mesh.get(), offset};
        case NodeKind::fgrade:
            node = node->children[0].get();
            break;
        case NodeKind::translate:
            offset = offset + node->offset;
            node = node->children[0].get();
            break;
        default:
            return std::nullopt;
        }
    }
    return std::nullopt;
}

} // namespace vcad
