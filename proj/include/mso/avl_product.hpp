#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <utility>

namespace mso {

struct TreeStats {
    std::uint64_t multiplications = 0;
    std::uint64_t node_constructions = 0;
};

// Persistent height-balanced sequence with a cached monoid product per
// subtree.  Positions are 1-based.  The monoid supplies:
//
//   using Element = ...;
//   Element identity_element() const;
//   Element multiply(const Element&, const Element&) const;
//   std::shared_ptr<const Element> measure(const Label&) const;
//
// measure returns a handle so a leaf can share its label's element instead of
// copying it; with matrix elements this is the difference between one letter
// matrix per symbol and one per position.
//
// Nodes are immutable; every operation returns a new root and shares all
// untouched subtrees with the inputs.  All annotation maintenance lives in
// the one node() primitive, and rotations are expressed as node constructions.
template <class Label, class Monoid>
class AvlProduct {
public:
    using Element = typename Monoid::Element;
    struct Node;
    using Tree = std::shared_ptr<const Node>;
    using Product = std::shared_ptr<const Element>;

    struct Node {
        Label label;
        Tree left;
        Tree right;
        std::size_t size;
        int height;
        Product prod;
    };

    explicit AvlProduct(Monoid monoid = {}, TreeStats* stats = nullptr)
        : monoid_(std::move(monoid)), stats_(stats) {}

    const Monoid& monoid() const { return monoid_; }

    static std::size_t size(const Tree& t) { return t ? t->size : 0; }
    static int height(const Tree& t) { return t ? t->height : 0; }

    static const Label& get(const Tree& t, std::size_t pos) {
        if (pos < 1 || pos > size(t))
            throw std::out_of_range("get: position out of range");
        const Node* n = t.get();
        for (;;) {
            std::size_t left = size(n->left);
            if (pos == left + 1)
                return n->label;
            if (pos <= left) {
                n = n->left.get();
            } else {
                pos -= left + 1;
                n = n->right.get();
            }
        }
    }

    template <class F>
    static void for_each(const Tree& t, F&& fn) {
        if (!t)
            return;
        for_each(t->left, fn);
        fn(t->label);
        for_each(t->right, fn);
    }

    Product out(const Tree& t) const {
        if (t)
            return t->prod;
        return std::make_shared<Element>(monoid_.identity_element());
    }

    Tree leaf(Label label) const { return node(nullptr, std::move(label), nullptr); }

    // Balanced construction: the largest complete tree with 2^(d+1)-1 nodes
    // fits the prefix; the n - (2^(d+1)-1) leftovers hang under the deepest
    // level as leaves, filled left to right.
    Tree init(std::span<const Label> items) const {
        if (items.empty())
            return nullptr;
        std::size_t n = items.size();
        int d = 0;
        while (((std::size_t{4} << d) - 1) <= n)
            ++d;
        std::size_t extras = n - ((std::size_t{2} << d) - 1);
        std::size_t cursor = 0;
        Tree t = build_complete(items, cursor, d, extras);
        return t;
    }

    Tree set(const Tree& t, std::size_t pos, Label label) const {
        if (pos < 1 || pos > size(t))
            throw std::out_of_range("set: position out of range");
        return set_rec(t, pos, std::move(label));
    }

    Tree join(const Tree& left, Label mid, const Tree& right) const {
        int hl = height(left);
        int hr = height(right);
        if (hl > hr + 1)
            return join_right(left, std::move(mid), right);
        if (hr > hl + 1)
            return join_left(left, std::move(mid), right);
        return node(left, std::move(mid), right);
    }

    struct SplitResult {
        Tree left;
        Label mid;
        Tree right;
    };

    // (positions 1..pos-1, label at pos, positions pos+1..size)
    SplitResult split(const Tree& t, std::size_t pos) const {
        if (pos < 1 || pos > size(t))
            throw std::out_of_range("split: position out of range");
        return split_rec(t, pos);
    }

    // (positions 1..pos, positions pos+1..size); pos ranges over 0..size.
    std::pair<Tree, Tree> split_inclusive(const Tree& t, std::size_t pos) const {
        if (pos > size(t))
            throw std::out_of_range("split_inclusive: position out of range");
        if (pos == 0)
            return {nullptr, t};
        if (pos == size(t))
            return {t, nullptr};
        SplitResult r = split_rec(t, pos);
        return {join(r.left, std::move(r.mid), nullptr), std::move(r.right)};
    }

    Tree concat(const Tree& a, const Tree& b) const {
        if (!a)
            return b;
        if (!b)
            return a;
        SplitResult r = split_rec(a, size(a));
        return join(r.left, std::move(r.mid), b);
    }

private:
    Product combine(const Product& a, const Product& b) const {
        if (stats_)
            ++stats_->multiplications;
        return std::make_shared<Element>(monoid_.multiply(*a, *b));
    }

    Tree node(Tree left, Label label, Tree right) const {
        Product prod = monoid_.measure(label);
        if (left)
            prod = combine(left->prod, prod);
        if (right)
            prod = combine(prod, right->prod);
        if (stats_)
            ++stats_->node_constructions;
        std::size_t sz = size(left) + size(right) + 1;
        int h = 1 + std::max(height(left), height(right));
        return std::make_shared<Node>(Node{std::move(label), std::move(left), std::move(right),
                                           sz, h, std::move(prod)});
    }

    Tree build_complete(std::span<const Label> items, std::size_t& cursor, int d,
                        std::size_t extras) const {
        if (d == 0) {
            Tree l = extras >= 1 ? leaf(items[cursor++]) : nullptr;
            Label mid = items[cursor++];
            Tree r = extras >= 2 ? leaf(items[cursor++]) : nullptr;
            return node(std::move(l), std::move(mid), std::move(r));
        }
        std::size_t capacity = std::size_t{1} << d;
        std::size_t left_extras = std::min(extras, capacity);
        Tree l = build_complete(items, cursor, d - 1, left_extras);
        Label mid = items[cursor++];
        Tree r = build_complete(items, cursor, d - 1, extras - left_extras);
        return node(std::move(l), std::move(mid), std::move(r));
    }

    Tree set_rec(const Tree& t, std::size_t pos, Label label) const {
        std::size_t left = size(t->left);
        if (pos == left + 1)
            return node(t->left, std::move(label), t->right);
        if (pos <= left)
            return node(set_rec(t->left, pos, std::move(label)), t->label, t->right);
        return node(t->left, t->label, set_rec(t->right, pos - left - 1, std::move(label)));
    }

    // Precondition: height(tl) > height(tr) + 1.  Descends the right spine of
    // tl until tr can be attached, then rebalances on the way out.  Rotations
    // are fused into the node compositions; no discarded intermediate is built.
    Tree join_right(const Tree& tl, Label k, const Tree& tr) const {
        const Tree& l = tl->left;
        const Tree& c = tl->right;
        if (height(c) <= height(tr) + 1) {
            if (std::max(height(c), height(tr)) <= height(l))
                return node(l, tl->label, node(c, std::move(k), tr));
            // double rotation: c becomes the root of this subtree
            return node(node(l, tl->label, c->left), c->label,
                        node(c->right, std::move(k), tr));
        }
        Tree grown = join_right(c, std::move(k), tr);
        if (grown->height <= height(l) + 1)
            return node(l, tl->label, std::move(grown));
        // single rotation: grown becomes the root of this subtree
        return node(node(l, tl->label, grown->left), grown->label, grown->right);
    }

    // Mirror image: height(tr) > height(tl) + 1.
    Tree join_left(const Tree& tl, Label k, const Tree& tr) const {
        const Tree& c = tr->left;
        const Tree& r = tr->right;
        if (height(c) <= height(tl) + 1) {
            if (std::max(height(tl), height(c)) <= height(r))
                return node(node(tl, std::move(k), c), tr->label, r);
            return node(node(tl, std::move(k), c->left), c->label,
                        node(c->right, tr->label, r));
        }
        Tree grown = join_left(tl, std::move(k), c);
        if (grown->height <= height(r) + 1)
            return node(std::move(grown), tr->label, r);
        return node(grown->left, grown->label, node(grown->right, tr->label, r));
    }

    SplitResult split_rec(const Tree& t, std::size_t pos) const {
        std::size_t left = size(t->left);
        if (pos == left + 1)
            return SplitResult{t->left, t->label, t->right};
        if (pos <= left) {
            SplitResult r = split_rec(t->left, pos);
            return SplitResult{std::move(r.left), std::move(r.mid),
                               join(r.right, t->label, t->right)};
        }
        SplitResult r = split_rec(t->right, pos - left - 1);
        return SplitResult{join(t->left, t->label, r.left), std::move(r.mid),
                           std::move(r.right)};
    }

    Monoid monoid_;
    TreeStats* stats_;
};

}  // namespace mso
