# cython: language_level=3
"""Compiled windowed max/min filters (hot path: two updates per ACK).

Mirrors ``_filters_py`` exactly: monotonic ring buffer of
(value, timestamp) pairs, in-window test ``at > now - window``.  Values
are stored as C doubles; every value handled by the simulator (rates as
floats, tick counts far below 2**53) round-trips exactly, so both
backends produce bit-identical results.
"""

from libc.stdlib cimport malloc, realloc, free

BACKEND = "cython"

cdef Py_ssize_t INITIAL_CAP = 64


cdef class _RingFilter:
    cdef double* _values
    cdef long long* _times
    cdef Py_ssize_t _head, _len, _cap
    cdef public long long window

    def __cinit__(self, long long window):
        self.window = window
        self._cap = INITIAL_CAP
        self._values = <double*> malloc(self._cap * sizeof(double))
        self._times = <long long*> malloc(self._cap * sizeof(long long))
        if self._values == NULL or self._times == NULL:
            raise MemoryError()
        self._head = 0
        self._len = 0

    def __dealloc__(self):
        if self._values != NULL:
            free(self._values)
        if self._times != NULL:
            free(self._times)

    cdef void _grow(self) except *:
        cdef Py_ssize_t new_cap = self._cap * 2
        cdef double* nv = <double*> malloc(new_cap * sizeof(double))
        cdef long long* nt = <long long*> malloc(new_cap * sizeof(long long))
        cdef Py_ssize_t i, src
        if nv == NULL or nt == NULL:
            if nv != NULL:
                free(nv)
            if nt != NULL:
                free(nt)
            raise MemoryError()
        for i in range(self._len):
            src = (self._head + i) % self._cap
            nv[i] = self._values[src]
            nt[i] = self._times[src]
        free(self._values)
        free(self._times)
        self._values = nv
        self._times = nt
        self._head = 0
        self._cap = new_cap

    cdef void _evict(self, long long now) noexcept:
        cdef long long cutoff = now - self.window
        while self._len > 0 and self._times[self._head] <= cutoff:
            self._head = (self._head + 1) % self._cap
            self._len -= 1

    def __len__(self):
        return self._len


cdef class WindowedMaxFilter(_RingFilter):

    def update(self, double value, long long now):
        cdef Py_ssize_t tail
        while self._len > 0:
            tail = (self._head + self._len - 1) % self._cap
            if self._values[tail] <= value:
                self._len -= 1
            else:
                break
        if self._len == self._cap:
            self._grow()
        tail = (self._head + self._len) % self._cap
        self._values[tail] = value
        self._times[tail] = now
        self._len += 1
        self._evict(now)

    def current(self, long long now):
        self._evict(now)
        if self._len == 0:
            return None
        return self._values[self._head]


cdef class WindowedMinFilter(_RingFilter):

    def update(self, double value, long long now):
        cdef Py_ssize_t tail
        while self._len > 0:
            tail = (self._head + self._len - 1) % self._cap
            if self._values[tail] >= value:
                self._len -= 1
            else:
                break
        if self._len == self._cap:
            self._grow()
        tail = (self._head + self._len) % self._cap
        self._values[tail] = value
        self._times[tail] = now
        self._len += 1
        self._evict(now)

    def current(self, long long now):
        self._evict(now)
        if self._len == 0:
            return None
        return self._values[self._head]
