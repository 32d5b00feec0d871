fn main() {
    // Behave like a normal pipeline citizen: die quietly on closed pipes
    // instead of panicking mid-print.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    std::process::exit(mimolink::cli::main());
}
