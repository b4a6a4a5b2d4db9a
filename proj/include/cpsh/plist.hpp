#pragma once

#include <cstddef>
#include <iterator>
#include <memory>
#include <stdexcept>
#include <utility>
#include <vector>

namespace cpsh {

/// Immutable singly-linked list with structural sharing.
///
/// Evaluation contexts are pushed and popped at every machine transition and
/// captured wholesale by shift, so they are represented as persistent lists:
/// capturing is O(1) and old configurations stay valid.
template <class T>
class PList {
    struct Node {
        T head;
        PList tail;
    };

public:
    PList() = default;
    PList(const PList&) = default;
    PList(PList&&) noexcept = default;
    PList& operator=(const PList&) = default;
    PList& operator=(PList&&) noexcept = default;

    // Long lists are released iteratively so that deep contexts cannot
    // exhaust the native stack on destruction.
    ~PList() {
        while (node_ && node_.use_count() == 1) {
            std::shared_ptr<Node> next = std::move(node_->tail.node_);
            node_ = std::move(next);
        }
    }

    static PList cons(T head, PList tail) {
        PList out;
        out.node_ = std::make_shared<Node>(Node{std::move(head), std::move(tail)});
        return out;
    }

    template <class It>
    static PList from_range(It first, It last) {
        std::vector<T> items(first, last);
        PList out;
        for (auto it = items.rbegin(); it != items.rend(); ++it) out = cons(*it, std::move(out));
        return out;
    }

    [[nodiscard]] bool empty() const noexcept { return !node_; }

    [[nodiscard]] const T& head() const {
        if (!node_) throw std::logic_error("PList::head on empty list");
        return node_->head;
    }

    [[nodiscard]] const PList& tail() const {
        if (!node_) throw std::logic_error("PList::tail on empty list");
        return node_->tail;
    }

    [[nodiscard]] std::size_t size() const noexcept {
        std::size_t n = 0;
        for (const Node* p = node_.get(); p != nullptr; p = p->tail.node_.get()) ++n;
        return n;
    }

    /// Identity of the first cell; equal ids imply equal lists.
    [[nodiscard]] const void* id() const noexcept { return node_.get(); }

    [[nodiscard]] PList push(T head) const { return cons(std::move(head), *this); }

    class const_iterator {
    public:
        using iterator_category = std::forward_iterator_tag;
        using value_type = T;
        using difference_type = std::ptrdiff_t;
        using pointer = const T*;
        using reference = const T&;

        const_iterator() = default;
        explicit const_iterator(const Node* n) : n_(n) {}
        reference operator*() const { return n_->head; }
        pointer operator->() const { return &n_->head; }
        const_iterator& operator++() {
            n_ = n_->tail.node_.get();
            return *this;
        }
        const_iterator operator++(int) {
            auto old = *this;
            ++*this;
            return old;
        }
        bool operator==(const const_iterator& o) const { return n_ == o.n_; }
        bool operator!=(const const_iterator& o) const { return n_ != o.n_; }

    private:
        const Node* n_ = nullptr;
    };

    [[nodiscard]] const_iterator begin() const { return const_iterator(node_.get()); }
    [[nodiscard]] const_iterator end() const { return const_iterator(); }

private:
    std::shared_ptr<Node> node_;
};

/// `front ++ back`, copying the cells of `front` only.
template <class T>
PList<T> append(const PList<T>& front, const PList<T>& back) {
    if (front.empty()) return back;
    std::vector<T> items(front.begin(), front.end());
    PList<T> out = back;
    for (auto it = items.rbegin(); it != items.rend(); ++it) out = PList<T>::cons(*it, std::move(out));
    return out;
}

}  // namespace cpsh
