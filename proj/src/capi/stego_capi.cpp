// C API surface; filled in after the core library.
