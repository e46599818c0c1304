# Shared helpers: settings, errors, concurrency
